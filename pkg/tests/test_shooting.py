import dataclasses
import math

import numpy as np
import pytest

from gravistat.models import make_model
from gravistat.shooting import (IntegrationError, IntegratorConfig,
                                gronwall_bound, initial_state, integrate,
                                integrate_xy, reconstruct_profile,
                                trajectory_distance)

MB = make_model("mb")


def small_rho_cfg(rho0: float, base: IntegratorConfig = IntegratorConfig()):
    return base.with_eps(min(base.eps_cut, 1e-3 * rho0))


class TestInitialState:
    def test_values_at_unit_density(self):
        t0, p, q = initial_state(1.0, 1e-6)
        assert t0 == pytest.approx(-6.9077553, abs=1e-6)
        assert p == 1.0
        assert q == pytest.approx(1.0 / 3.0, abs=1e-7)

    def test_values_at_density_four(self):
        t0, p, q = initial_state(4.0, 1e-6)
        assert t0 == pytest.approx(-7.6009025, abs=1e-6)
        assert p == 4.0
        assert q == pytest.approx(1.3333333, abs=1e-7)

    def test_truncation_precondition(self):
        with pytest.raises(ValueError):
            initial_state(1.0, 0.5)
        with pytest.raises(ValueError):
            initial_state(1e-4, 1e-6)
        with pytest.raises(ValueError):
            initial_state(-1.0, 1e-6)


class TestIntegrate:
    def test_small_mass_linear_regime(self):
        rho0 = 1e-4
        traj = integrate(MB, rho0, small_rho_cfg(rho0))
        m = float(traj.q[-1])
        assert abs(3.0 * m / rho0 - 1.0) < 1e-3

    def test_spiral_focus_mass(self):
        traj = integrate(MB, 1e8)
        assert abs(float(traj.q[-1]) - 2.0) < 0.05

    def test_trajectory_views_consistent(self):
        traj = integrate(MB, 1.0)
        rows = list(traj.samples())
        assert len(rows) == traj.cfg.dense_samples
        s, x, y, p, q = rows[500]
        assert x == pytest.approx(math.exp(2 * s) * q, rel=1e-14)
        assert y == pytest.approx(math.exp(2 * s) * p, rel=1e-14)
        assert traj.s[0] == traj.t_start and traj.s[-1] == 0.0

    def test_confinement_and_monotone_samples(self):
        traj = integrate(make_model("sfd", 0.05), 100.0)
        assert np.all(traj.p >= 0.0) and np.all(traj.q >= 0.0)
        assert np.all(traj.p <= 3.0 * traj.q + 1e-8 * traj.rho0)
        assert np.all(np.diff(traj.p) <= 1e-9 * traj.rho0)
        assert np.all(np.diff(traj.q) <= 1e-9 * traj.rho0)

    def test_step_budget_exhaustion_keeps_partial_trajectory(self):
        cfg = IntegratorConfig(max_steps=40, dense_samples=500)
        with pytest.raises(IntegrationError) as err:
            integrate(MB, 1.0, cfg)
        partial = err.value.trajectory
        assert partial is not None
        assert partial.s.size < 500
        assert partial.s[-1] < 0.0

    def test_dual_form_agreement(self):
        for rho0 in (1.0, 100.0):
            a = integrate(MB, rho0)
            b = integrate_xy(MB, rho0)
            assert float(np.max(np.abs(a.x - b.x))) < 1e-8
            assert float(np.max(np.abs(a.y - b.y))) < 1e-8

    @pytest.mark.parametrize("model", [MB, make_model("sfd", 0.01)])
    def test_truncation_robustness(self, model):
        cfg6 = IntegratorConfig(eps_cut=1e-6)
        cfg7 = IntegratorConfig(eps_cut=1e-7)
        m6 = float(integrate(model, 1.0, cfg6).q[-1])
        m7 = float(integrate(model, 1.0, cfg7).q[-1])
        assert abs(m6 - m7) / m6 < 1e-4

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(eps_cut=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(eps_cut=2.0)
        with pytest.raises(ValueError):
            IntegratorConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dense_samples=1)


def _min_distance_to_polyline(points, poly):
    """Distances from query points to a polyline, segment-accurate."""
    a = poly[:-1]
    b = poly[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom[denom == 0.0] = 1.0
    out = np.empty(len(points))
    for i, pt in enumerate(points):
        ap = pt - a
        t = np.clip(np.einsum("ij,ij->i", ap, ab) / denom, 0.0, 1.0)
        closest = a + t[:, None] * ab
        d = closest - pt
        out[i] = math.sqrt(float(np.min(np.einsum("ij,ij->i", d, d))))
    return out


def test_mb_phase_curves_are_time_translates():
    # the rescaling-free system is autonomous for mb: two central densities
    # trace the same phase-plane curve over the overlapping y-window
    t_small = integrate(MB, 1.0)
    t_large = integrate(MB, 100.0)
    a = np.column_stack([t_small.x, t_small.y])
    b = np.column_stack([t_large.x, t_large.y])
    y_hi = min(a[:, 1].max(), b[:, 1].max())
    a_win = a[a[:, 1] <= y_hi]
    b_win = b[b[:, 1] <= y_hi]
    d_ab = _min_distance_to_polyline(a_win, b)
    d_ba = _min_distance_to_polyline(b_win, a)
    assert max(d_ab.max(), d_ba.max()) < 1e-3


class TestReconstruct:
    def test_mb_multiplier_is_log_boundary_y(self):
        traj = integrate(MB, 5.0)
        profile = reconstruct_profile(traj)
        assert abs(profile.multiplier - math.log(float(traj.y[-1]))) < 1e-10

    @pytest.mark.parametrize("model", [MB, make_model("sfd", 0.1),
                                       make_model("fd", 0.1)])
    def test_boundary_and_center_density(self, model):
        traj = integrate(model, 2.0)
        profile = reconstruct_profile(traj)
        assert profile.rho(1.0) == float(traj.p[-1])
        r_center = math.exp(traj.t_start)
        assert profile.rho(r_center) == pytest.approx(traj.rho0, rel=1e-3)
        assert profile.mass / (4.0 * math.pi) == float(traj.q[-1])
        assert profile.m == float(traj.q[-1])

    def test_potential_vanishes_on_boundary_and_density_monotone(self):
        traj = integrate(MB, 10.0)
        profile = reconstruct_profile(traj)
        assert abs(profile.phi(1.0)) < 1e-12
        r = np.geomspace(math.exp(traj.t_start), 1.0, 64)
        rho = profile.rho(r)
        assert np.all(np.diff(rho) <= 1e-12 * traj.rho0)
        phi = profile.phi(r)
        assert np.all(np.diff(phi) >= -1e-10)  # phi climbs to its boundary zero
        with pytest.raises(ValueError):
            profile.rho(0.0)
        with pytest.raises(ValueError):
            profile.rho(1.5)

    def test_incomplete_trajectory_rejected(self):
        traj = integrate(MB, 1.0)
        clipped = dataclasses.replace(traj, s=traj.s[:-5], p=traj.p[:-5],
                                      q=traj.q[:-5])
        with pytest.raises(ValueError):
            reconstruct_profile(clipped)


class TestTrajectoryDistance:
    def test_degenerate_eta_is_zero_distance(self):
        assert trajectory_distance(make_model("sfd", 0.0), 1.0) < 1e-9

    def test_monotone_in_eta_and_bounded(self):
        d_small = trajectory_distance(make_model("sfd", 5e-4), 1.0)
        d_large = trajectory_distance(make_model("sfd", 5e-2), 1.0)
        assert d_small < d_large
        assert d_small <= gronwall_bound(5e-4, 1.0)
        assert d_large <= gronwall_bound(5e-2, 1.0)

    def test_gronwall_bound_values(self):
        assert gronwall_bound(1e-3, 1.0) == pytest.approx(2.33e-4, rel=0.01)
        assert trajectory_distance(make_model("sfd", 1e-3), 1.0) <= 2.33e-4
        assert trajectory_distance(make_model("sfd", 1e-4), 2.0) <= gronwall_bound(
            1e-4, 2.0)

    def test_requires_quantum_model(self):
        with pytest.raises(ValueError):
            trajectory_distance(MB, 1.0)
