import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravistat.fermi import fermi_eval
from gravistat.models import (FD, MB, SFD, ModelSpec, ThermoValues, defect,
                              enthalpy, entropy_density_curve,
                              inverse_enthalpy, make_model, response,
                              response_fn, thermo)

log_density = st.floats(-6.0, 6.0).map(lambda e: 10.0 ** e)


@pytest.fixture(scope="module")
def models():
    return {MB: make_model(MB), SFD: make_model(SFD, 0.1),
            FD: make_model(FD, 0.1)}


class TestMakeModel:
    def test_fd_mu_from_eta(self):
        model = make_model(FD, 0.1)
        assert model.mu == pytest.approx(51.639778, abs=1e-5)
        assert model.mu ** 2 * model.eta ** 3 == pytest.approx(8.0 / 3.0, rel=1e-14)

    def test_sfd_at_zero_eta_degenerates_to_mb_maps(self):
        degenerate = make_model(SFD, 0.0)
        for z in (0.2, 1.0, 7.5, 120.0):
            assert response(degenerate, z) == pytest.approx(z, rel=1e-14)
            assert enthalpy(degenerate, z) == pytest.approx(math.log(z), rel=1e-14)

    def test_eta_constraints(self):
        make_model(MB, 0.0)
        with pytest.raises(ValueError):
            make_model(MB, 0.1)
        with pytest.raises(ValueError):
            make_model(SFD, -1e-3)
        with pytest.raises(ValueError):
            make_model(FD, 0.0)

    def test_modelspec_invariants_enforced_on_direct_construction(self):
        with pytest.raises(ValueError):
            ModelSpec("fd", 0.1, 50.0)      # mu inconsistent with eta
        with pytest.raises(ValueError):
            ModelSpec("mb", 0.0, 3.0)       # mu meaningless here
        with pytest.raises(ValueError):
            ModelSpec("weird", 0.0)


class TestResponse:
    def test_mb_identity(self, models):
        assert response(models[MB], 5.0) == 5.0

    def test_sfd_closed_form(self):
        model = make_model(SFD, 0.5)
        assert response(model, 8.0) == pytest.approx(1.0 / (0.125 + 0.25), rel=1e-12)

    def test_fd_close_to_identity_for_small_eta(self, models, fd_defect_constant):
        value = response(models[FD], 1.0)
        assert 1.0 - fd_defect_constant * 0.1 <= value <= 1.0

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    @given(z=log_density)
    def test_bounded_by_identity(self, kind, z, models):
        value = response(models[kind], z)
        assert 0.0 <= value <= z * (1.0 + 1e-12)

    def test_response_is_reciprocal_enthalpy_slope(self, models):
        for model in models.values():
            for z in (0.05, 1.0, 30.0):
                h = 1e-6 * z
                slope = (enthalpy(model, z + h) - enthalpy(model, z - h)) / (2.0 * h)
                assert response(model, z) * slope == pytest.approx(1.0, abs=1e-6)

    def test_response_fn_matches_and_keeps_local_seed(self, models):
        resp = response_fn(models[FD])
        zs = [0.5, 0.51, 0.52, 5.0, 0.5]
        for z in zs:
            assert resp(z) == pytest.approx(response(models[FD], z), rel=1e-9)

    def test_domain_error(self, models):
        for model in models.values():
            with pytest.raises(ValueError):
                response(model, 0.0)
            with pytest.raises(ValueError):
                response(model, -1.0)


class TestEnthalpy:
    def test_mb_log(self, models):
        assert enthalpy(models[MB], math.e) == pytest.approx(1.0, rel=1e-14)

    def test_sfd_value(self):
        assert enthalpy(make_model(SFD, 0.1), 1.0) == pytest.approx(0.15, rel=1e-12)

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    def test_inverse_pair(self, kind, models):
        model = models[kind]
        for t in (-5.0, 0.0, 5.0):
            assert enthalpy(model, inverse_enthalpy(model, t)) == pytest.approx(
                t, abs=1e-8)

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    @given(z=st.floats(-6.0, 6.0).map(lambda e: 10.0 ** e))
    def test_round_trip_over_wide_density_range(self, kind, z, models):
        model = models[kind]
        assert inverse_enthalpy(model, enthalpy(model, z)) == pytest.approx(
            z, rel=1e-8)

    def test_strictly_increasing(self, models):
        zs = np.geomspace(1e-6, 1e6, 200)
        for model in models.values():
            values = [enthalpy(model, float(z)) for z in zs]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_mb_inverse_value(self, models):
        assert inverse_enthalpy(models[MB], 0.0) == 1.0

    def test_fd_inverse_value(self, models):
        expected = 51.639778 / 2.0 * 0.6780938951531010
        assert inverse_enthalpy(models[FD], 0.0) == pytest.approx(expected, abs=1e-3)


class TestThermo:
    def test_mb_values(self, models):
        tv = thermo(models[MB], 1.0)
        assert tv.pressure == 1.0
        assert tv.entropy_density == pytest.approx(-1.0, rel=1e-14)

    def test_sfd_entropy_density(self):
        tv = thermo(make_model(SFD, 0.1), 1.0)
        assert tv.entropy_density == pytest.approx(-0.91, rel=1e-12)

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    def test_pressure_slope_is_z_times_enthalpy_slope(self, kind, models):
        model = models[kind]
        for z in (0.1, 1.0, 50.0):
            h = 1e-6 * z
            dp = (thermo(model, z + h).pressure - thermo(model, z - h).pressure) / (2 * h)
            dh = (enthalpy(model, z + h) - enthalpy(model, z - h)) / (2 * h)
            assert dp == pytest.approx(z * dh, rel=1e-6)

    def test_fd_entropy_density_slope_is_enthalpy(self, models):
        model = models[FD]
        z, h = 1.0, 1e-6
        slope = (thermo(model, z + h).entropy_density
                 - thermo(model, z - h).entropy_density) / (2 * h)
        assert slope == pytest.approx(enthalpy(model, z), abs=1e-6)

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    def test_entropy_density_is_zh_minus_pressure(self, kind, models):
        model = models[kind]
        for z in (0.3, 2.0, 40.0):
            tv = thermo(model, z)
            expected = z * enthalpy(model, z) - tv.pressure
            assert tv.entropy_density == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    def test_pressure_vanishes_at_zero_density(self, kind, models):
        assert thermo(models[kind], 1e-12).pressure < 1e-10

    @pytest.mark.parametrize("kind", [MB, SFD, FD])
    def test_curve_matches_pointwise_thermo(self, kind, models):
        model = models[kind]
        zs = np.geomspace(0.01, 100.0, 7)
        curve = entropy_density_curve(model, zs)
        for z, beta in zip(zs, curve):
            assert beta == pytest.approx(thermo(model, float(z)).entropy_density,
                                         rel=1e-10)

    def test_frozen_value_object(self):
        tv = ThermoValues(1.0, -1.0)
        with pytest.raises(AttributeError):
            tv.pressure = 2.0


class TestDefect:
    def test_mb_zero(self, models):
        assert defect(models[MB], 17.3) == 0.0

    def test_sfd_closed_form_value(self):
        assert defect(make_model(SFD, 0.1), 1.0) == pytest.approx(0.1 / 1.1,
                                                                  rel=1e-12)

    @pytest.mark.parametrize("eta", [1e-4, 1e-2, 1.0])
    def test_sfd_closed_form_is_z_minus_response(self, eta):
        model = make_model(SFD, eta)
        for z in np.geomspace(1e-3, 1e6, 50):
            direct = z - response(model, float(z))
            closed = defect(model, float(z))
            assert abs(direct - closed) <= max(1e-12 * closed, 4e-16 * z)

    @pytest.mark.parametrize("eta", [1e-4, 1e-2, 1.0])
    def test_sfd_bounds_on_dense_grid(self, eta):
        model = make_model(SFD, eta)
        zs = np.geomspace(1e-3, 1e6, 10_000)
        d = defect(model, 1.0)  # warm the path; the loop is the real check
        assert d >= 0.0
        for z in zs:
            value = defect(model, float(z))
            assert 0.0 <= value <= eta * float(z) ** (5.0 / 3.0)

    @pytest.mark.parametrize("eta", [1e-4, 1e-2, 1.0])
    def test_fd_bounds_on_grid(self, eta, fd_defect_constant):
        model = make_model(FD, eta)
        for z in np.geomspace(1e-3, 1e6, 200):
            value = defect(model, float(z))
            assert -1e-13 * z <= value <= fd_defect_constant * eta * float(z) ** (5.0 / 3.0)

    def test_vanishing_with_eta_at_fixed_density(self, fd_defect_constant):
        z = 3.0
        for eta in (1e-1, 1e-2, 1e-3, 1e-4):
            gap_sfd = abs(response(make_model(SFD, eta), z) - z)
            assert gap_sfd <= eta * z ** (5.0 / 3.0)
            gap_fd = abs(response(make_model(FD, eta), z) - z)
            assert gap_fd <= fd_defect_constant * eta * z ** (5.0 / 3.0) * (1 + 1e-9)


def test_grid_sup_ratio_is_stable_under_refinement(fd_defect_constant):
    model = make_model(FD, 1.0)
    sups = []
    for n in (300, 600):
        ratios = [defect(model, float(w)) / float(w) ** (5.0 / 3.0)
                  for w in np.geomspace(1e-3, 1e3, n)]
        sups.append(max(ratios))
    assert abs(sups[1] - sups[0]) <= 0.01 * sups[1]
    assert sups[1] <= fd_defect_constant * (1.0 + 1e-9)
