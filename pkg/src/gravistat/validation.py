"""Runtime monitors for the analytic structure of the solutions.

Every quantity checked here is a theorem about exact trajectories:
confinement to the positive quadrant, the monotone rescaled quantities,
the mass inequalities, and the escape of trajectories started on or
above the tangent half-line y = 3x.  A failed check therefore signals a
numerical defect, so checks report rather than raise, letting sweeps
aggregate pass rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rk
from .models import FD, MB, SFD, ModelSpec, enthalpy, make_model, response
from .shooting import (DEFAULT_INTEGRATOR, IntegratorConfig, SolutionProfile,
                       Trajectory, gronwall_bound, integrate,
                       reconstruct_profile, trajectory_distance, xy_rhs)

MONOTONE_TOL_FACTOR = 10.0     # slack allowance in units of integrator tolerance
EXIT_HORIZON = -60.0           # backward horizon for quadrant-exit checks


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    worst_margin: float    # most negative slack observed (scaled)
    location: float        # s- or z-value where the worst margin occurred
    tolerance: float       # margin must stay above -tolerance to pass
    inconclusive: bool = False


def _monotone_report(name: str, s: np.ndarray, values: np.ndarray,
                     increasing: bool, tolerance: float) -> CheckReport:
    scale = max(float(np.max(np.abs(values))), 1e-300)
    diffs = np.diff(values) if increasing else -np.diff(values)
    margins = diffs / scale
    worst = int(np.argmin(margins))
    worst_margin = float(margins[worst])
    return CheckReport(name=name, passed=worst_margin >= -tolerance,
                       worst_margin=worst_margin, location=float(s[worst + 1]),
                       tolerance=tolerance)


def _lower_bound_report(name: str, s: np.ndarray, values: np.ndarray,
                        scale: float, tolerance: float) -> CheckReport:
    margins = values / scale
    worst = int(np.argmin(margins))
    return CheckReport(name=name, passed=float(margins[worst]) >= -tolerance,
                       worst_margin=float(margins[worst]),
                       location=float(s[worst]), tolerance=tolerance)


def check_trajectory_invariants(traj: Trajectory,
                                tolerance: float | None = None) -> list[CheckReport]:
    """Positivity, confinement below y = 3x, the three monotone rescaled
    quantities, and the initial mean-to-local density ratio 1/3."""
    if tolerance is None:
        tolerance = MONOTONE_TOL_FACTOR * max(traj.cfg.rel_tol, traj.cfg.abs_tol)
    s, p, q = traj.s, traj.p, traj.q
    scale = max(traj.rho0, 1e-300)
    reports = [
        _lower_bound_report("x_nonnegative", s, q * np.exp(2.0 * s), scale, tolerance),
        _lower_bound_report("y_nonnegative", s, p * np.exp(2.0 * s), scale, tolerance),
        _lower_bound_report("y_below_3x", s, 3.0 * q - p, scale, tolerance),
        _monotone_report("p_nonincreasing", s, p, increasing=False,
                         tolerance=tolerance),
        _monotone_report("q_nonincreasing", s, q, increasing=False,
                         tolerance=tolerance),
        _monotone_report("exp_s_3x_minus_y_nondecreasing", s,
                         np.exp(3.0 * s) * (3.0 * q - p), increasing=True,
                         tolerance=tolerance),
    ]
    ratio_err = float(abs(traj.q[0] / traj.p[0] - 1.0 / 3.0))
    reports.append(CheckReport(name="initial_ratio_one_third",
                               passed=ratio_err <= 1e-12,
                               worst_margin=-ratio_err,
                               location=float(s[0]), tolerance=1e-12))
    return reports


def mass_estimate_margins(model: ModelSpec, m: float,
                          sup_density: float) -> tuple[float, float]:
    """Scaled slack of the two mass inequalities at one branch sample:
    m <= sup_density / 3, and 2 H(sup) - R(sup) m <= m + 2 H(3 m).
    Both are nonnegative for exact solutions."""
    slack_simple = (sup_density / 3.0 - m) / max(sup_density / 3.0, 1e-300)
    lhs = 2.0 * enthalpy(model, sup_density) - response(model, sup_density) * m
    rhs = m + 2.0 * enthalpy(model, 3.0 * m)
    slack_hard = (rhs - lhs) / max(abs(lhs), abs(rhs), 1.0)
    return slack_simple, slack_hard


def check_mass_estimates(model: ModelSpec,
                         profile: SolutionProfile) -> list[CheckReport]:
    """CheckReports for the two mass inequalities of a profile."""
    tol = 1e-8
    slack_simple, slack_hard = mass_estimate_margins(model, profile.m,
                                                     profile.sup_density)
    sup = profile.sup_density
    return [CheckReport(name="mass_below_third_sup_density",
                        passed=slack_simple >= -tol,
                        worst_margin=slack_simple, location=sup, tolerance=tol),
            CheckReport(name="enthalpy_mass_inequality",
                        passed=slack_hard >= -tol,
                        worst_margin=slack_hard, location=sup, tolerance=tol)]


def check_quadrant_exit(model: ModelSpec, x0: float, y0: float,
                        cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                        horizon: float = EXIT_HORIZON) -> CheckReport:
    """Integrate (x, y) backward from s = 0; trajectories starting with
    y0 >= 3 x0 > 0 must leave the positive quadrant before `horizon`."""
    if not (x0 > 0.0 and y0 >= 3.0 * x0):
        raise ValueError("exit check requires x0 > 0 and y0 >= 3 x0")
    res = rk.dp45(xy_rhs(model), [0.0, horizon], x0, y0,
                  rtol=cfg.rel_tol, atol=cfg.abs_tol, max_steps=cfg.max_steps,
                  stop=lambda s, x, y: x < 0.0 or y < 0.0)
    name = "quadrant_exit"
    if res.status == rk.STOPPED:
        s_exit = res.stop_state[0]
        margin = (s_exit - horizon) / abs(horizon)
        return CheckReport(name=name, passed=True, worst_margin=margin,
                           location=s_exit, tolerance=0.0)
    if res.status == rk.DONE:
        # remained in the quadrant: report how far from exiting it stayed
        closest = min(res.us[-1], res.vs[-1])
        return CheckReport(name=name, passed=False,
                           worst_margin=-abs(closest) / max(x0, y0),
                           location=horizon, tolerance=0.0)
    return CheckReport(name=name, passed=False, worst_margin=math.nan,
                       location=horizon, tolerance=0.0, inconclusive=True)


def standard_matrix() -> list[tuple[ModelSpec, float]]:
    """The default model x rho0 grid exercised by the validate command."""
    models = [make_model(MB),
              make_model(SFD, 1e-4), make_model(SFD, 1e-2), make_model(SFD, 5e-2),
              make_model(FD, 1e-2), make_model(FD, 1e-1)]
    rho0s = [1e-4, 1.0, 1e2, 1e6]
    return [(model, rho0) for model in models for rho0 in rho0s]


def matrix_config(rho0: float,
                  base: IntegratorConfig = DEFAULT_INTEGRATOR) -> IntegratorConfig:
    """Shrink eps_cut where rho0 is small so the truncation precondition
    eps_cut <= 1e-3 rho0 holds across the whole matrix."""
    eps = min(base.eps_cut, 1e-3 * rho0)
    return base.with_eps(eps) if eps != base.eps_cut else base


def run_standard_checks(base_cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                        kinds: tuple[str, ...] | None = None,
                        rho0_values: tuple[float, ...] | None = None) -> list[dict]:
    """Run the full check suite over the standard matrix; returns one
    JSON-ready record per case."""
    records = []
    for model, rho0 in standard_matrix():
        if kinds is not None and model.kind not in kinds:
            continue
        if rho0_values is not None and rho0 not in rho0_values:
            continue
        cfg = matrix_config(rho0, base_cfg)
        traj = integrate(model, rho0, cfg)
        reports = check_trajectory_invariants(traj)
        reports += check_mass_estimates(model, reconstruct_profile(traj))
        records.append({"kind": model.kind, "eta": model.eta, "rho0": rho0,
                        "checks": reports})

    exit_cases = [(make_model(MB), 1.0, 3.5), (make_model(MB), 1.0, 3.0),
                  (make_model(SFD, 1e-2), 1.0, 4.0)]
    for model, x0, y0 in exit_cases:
        if kinds is not None and model.kind not in kinds:
            continue
        report = check_quadrant_exit(model, x0, y0, base_cfg)
        records.append({"kind": model.kind, "eta": model.eta,
                        "start": [x0, y0], "checks": [report]})

    if kinds is None or SFD in kinds:
        for eta in (1e-3, 1e-4):
            for rho0 in (0.5, 1.0, 2.0):
                if rho0_values is not None and rho0 not in rho0_values:
                    continue
                model = make_model(SFD, eta)
                dist = trajectory_distance(model, rho0, matrix_config(rho0, base_cfg))
                bound = gronwall_bound(eta, rho0)
                slack = (bound - dist) / bound
                report = CheckReport(name="gronwall_distance_bound",
                                     passed=slack >= 0.0, worst_margin=slack,
                                     location=rho0, tolerance=0.0)
                records.append({"kind": model.kind, "eta": eta, "rho0": rho0,
                                "distance": dist, "bound": bound,
                                "checks": [report]})
    return records
