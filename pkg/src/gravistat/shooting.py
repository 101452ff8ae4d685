"""Shooting integration of the cumulated-mass system and profile recovery.

Radial equilibria on the unit ball are parametrized by the central
density rho0.  In logarithmic radius s = log r the cumulated-mass
variables x(s) = zeta(r)/r and y(s) = zeta'(r) obey

    x' = y - x,      y' = 2 y - e^{2s} R(e^{-2s} y) x,

and the numerically tame rescaling p = e^{-2s} y (the local density at
radius e^s) and q = e^{-2s} x (one third of the mean interior density)
obeys

    p' = -R(p) e^{2s} q,      q' = p - 3 q.

A trajectory starts on the half-line p = 3 q with p = rho0 at the
truncation time t_start = log(eps_cut / rho0) / 2, where y is of order
eps_cut, and runs to s = 0 (the ball boundary).  The total mass is
M = 4 pi q(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import rk
from .models import FD, MB, SFD, ModelSpec, enthalpy, make_model, response_fn


class IntegrationError(RuntimeError):
    """Integration could not be completed; may carry a partial trajectory."""

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


class NumericalBreakdownError(IntegrationError):
    """The state left the physical region by more than the clamp allowance."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Trajectory integration settings.

    eps_cut is the truncation level for y at the starting time; it must
    stay at or below 1e-3 * rho0, which integrate() enforces per call.
    """

    eps_cut: float = 1e-6
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 2_000_000
    dense_samples: int = 2000

    def __post_init__(self):
        if not (0.0 < self.eps_cut < 1.0):
            raise ValueError("eps_cut must lie in (0, 1)")
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.dense_samples < 2:
            raise ValueError("dense_samples must be at least 2")

    def with_eps(self, eps_cut: float) -> "IntegratorConfig":
        return IntegratorConfig(eps_cut, self.abs_tol, self.rel_tol,
                                self.max_steps, self.dense_samples)


DEFAULT_INTEGRATOR = IntegratorConfig()


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    rhs_evals: int
    clamped: int


@dataclass(frozen=True)
class Trajectory:
    """Integrated path s -> (p, q) on [t_start, 0] with (x, y) views."""

    model: ModelSpec
    rho0: float
    t_start: float
    s: np.ndarray
    p: np.ndarray
    q: np.ndarray
    stats: StepStats
    cfg: IntegratorConfig

    @property
    def x(self) -> np.ndarray:
        return np.exp(2.0 * self.s) * self.q

    @property
    def y(self) -> np.ndarray:
        return np.exp(2.0 * self.s) * self.p

    def samples(self) -> Iterator[tuple[float, float, float, float, float]]:
        """Yield (s, x, y, p, q) rows in integration order."""
        x, y = self.x, self.y
        for i in range(self.s.size):
            yield (float(self.s[i]), float(x[i]), float(y[i]),
                   float(self.p[i]), float(self.q[i]))

    @property
    def complete(self) -> bool:
        return self.s.size >= 2 and self.s[-1] == 0.0


@dataclass(frozen=True)
class SolutionProfile:
    """Physical reconstruction of one equilibrium solution."""

    trajectory: Trajectory
    mass: float              # M = 4 pi q(0)
    m: float                 # normalized mass M / (4 pi)
    sup_density: float       # rho0
    boundary_density: float  # rho(1) = p(0)
    multiplier: float        # lambda = H(rho(1)), since phi(1) = 0

    def rho(self, r):
        """Density at radius r in (0, 1]; constant at rho0 below the
        truncation radius."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r > 1.0):
            raise ValueError("radius must lie in (0, 1]")
        s = np.clip(np.log(r), self.trajectory.t_start, 0.0)
        out = np.interp(s, self.trajectory.s, self.trajectory.p)
        return float(out) if out.ndim == 0 else out

    def phi(self, r):
        """Potential at radius r, vanishing on the boundary:
        phi = lambda - H(rho)."""
        dens = np.atleast_1d(self.rho(r))
        vals = np.array([self.multiplier - enthalpy(self.trajectory.model, d)
                         for d in dens])
        return float(vals[0]) if np.isscalar(r) or np.ndim(r) == 0 else vals


def initial_state(rho0: float, eps_cut: float) -> tuple[float, float, float]:
    """Truncated starting data (t_start, p, q) on the p = 3 q half-line."""
    if not (math.isfinite(rho0) and rho0 > 0.0):
        raise ValueError(f"rho0 must be positive, got {rho0!r}")
    if not (0.0 < eps_cut <= 1e-3 * rho0):
        raise ValueError(
            f"eps_cut must satisfy 0 < eps_cut <= 1e-3 * rho0; "
            f"got eps_cut={eps_cut!r} with rho0={rho0!r}")
    return 0.5 * math.log(eps_cut / rho0), rho0, rho0 / 3.0


def sample_grid(t_start: float, n: int) -> np.ndarray:
    """Output abscissae on [t_start, 0]: clustered near t_start (so the
    center of the ball is resolved in radius), uniform toward s = 0."""
    if n < 16:
        grid = np.linspace(t_start, 0.0, n)
    else:
        span = -t_start
        n_log = n // 2
        head = t_start + np.geomspace(span * 1e-6, span * 0.5, n_log)
        tail = np.linspace(0.5 * t_start, 0.0, n - n_log)[1:]
        grid = np.concatenate(([t_start], head, tail))
    grid[0] = t_start
    grid[-1] = 0.0
    return grid


def pq_rhs(model: ModelSpec) -> rk.Rhs:
    """Right-hand side of the (p, q) system; densities clamped at zero
    so trial stages slightly past the axis stay evaluable."""
    resp = response_fn(model)

    def rhs(s: float, p: float, q: float) -> tuple[float, float]:
        r = resp(p) if p > 0.0 else 0.0
        return (-r * math.exp(2.0 * s) * q, p - 3.0 * q)

    return rhs


def xy_rhs(model: ModelSpec) -> rk.Rhs:
    """Right-hand side of the (x, y) system with the same clamping."""
    resp = response_fn(model)

    def rhs(s: float, x: float, y: float) -> tuple[float, float]:
        z = math.exp(-2.0 * s) * y
        r = resp(z) if z > 0.0 else 0.0
        return (y - x, 2.0 * y - math.exp(2.0 * s) * r * x)

    return rhs


def _run(model: ModelSpec, rhs: rk.Rhs, grid: np.ndarray, u0: float, v0: float,
         cfg: IntegratorConfig, rho0: float, build) -> Trajectory:
    clamp_allowance = 10.0 * cfg.abs_tol
    clamped = [0]

    def hook(t: float, u: float, v: float) -> tuple[float, float]:
        for val in (u, v):
            if val < -clamp_allowance:
                raise NumericalBreakdownError(
                    f"state left [0, inf) by {-val:.3e} at s={t:.6g} "
                    f"(rho0={rho0:g}); the rho0/eps_cut pairing is invalid")
        if u < 0.0 or v < 0.0:
            clamped[0] += 1
            return (max(u, 0.0), max(v, 0.0))
        return (u, v)

    res = rk.dp45(rhs, grid, u0, v0, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                  max_steps=cfg.max_steps, accept_hook=hook)
    stats = StepStats(res.stats.accepted, res.stats.rejected,
                      res.stats.rhs_evals, clamped[0])
    traj = build(grid[:res.n_filled], res.us, res.vs, stats)
    if res.status == rk.MAX_STEPS:
        raise IntegrationError(
            f"step budget {cfg.max_steps} exhausted at s={grid[res.n_filled - 1]:.6g} "
            f"(rho0={rho0:g})", traj)
    if res.status == rk.STALLED:
        raise IntegrationError(
            f"step size underflow near s={grid[res.n_filled - 1]:.6g} (rho0={rho0:g})",
            traj)
    return traj


def integrate(model: ModelSpec, rho0: float,
              cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> Trajectory:
    """Integrate the (p, q) system from the truncated start to s = 0."""
    t_start, p0, q0 = initial_state(rho0, cfg.eps_cut)
    grid = sample_grid(t_start, cfg.dense_samples)

    def build(s, us, vs, stats):
        return Trajectory(model=model, rho0=rho0, t_start=t_start,
                          s=np.asarray(s, dtype=float),
                          p=np.asarray(us, dtype=float),
                          q=np.asarray(vs, dtype=float), stats=stats, cfg=cfg)

    return _run(model, pq_rhs(model), grid, p0, q0, cfg, rho0, build)


def integrate_xy(model: ModelSpec, rho0: float,
                 cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> Trajectory:
    """Integrate the (x, y) system directly and report the same
    Trajectory view (used to cross-check the rescaled route)."""
    t_start, p0, q0 = initial_state(rho0, cfg.eps_cut)
    grid = sample_grid(t_start, cfg.dense_samples)
    x0 = cfg.eps_cut / 3.0
    y0 = cfg.eps_cut

    def build(s, us, vs, stats):
        s = np.asarray(s, dtype=float)
        x = np.asarray(us, dtype=float)
        y = np.asarray(vs, dtype=float)
        scale = np.exp(-2.0 * s)
        return Trajectory(model=model, rho0=rho0, t_start=t_start,
                          s=s, p=scale * y, q=scale * x, stats=stats, cfg=cfg)

    return _run(model, xy_rhs(model), grid, x0, y0, cfg, rho0, build)


def reconstruct_profile(traj: Trajectory) -> SolutionProfile:
    """Physical quantities of a completed trajectory."""
    if not traj.complete:
        raise ValueError("trajectory does not reach s = 0; cannot reconstruct")
    m = float(traj.q[-1])
    boundary = float(traj.p[-1])
    return SolutionProfile(
        trajectory=traj,
        mass=4.0 * math.pi * m,
        m=m,
        sup_density=traj.rho0,
        boundary_density=boundary,
        multiplier=enthalpy(traj.model, boundary),
    )


def trajectory_distance(model_eta: ModelSpec, rho0: float,
                        cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> float:
    """sup over the sample grid of e^{-2s} |y_eta - y_0| against the mb
    trajectory with the same rho0 and settings (equivalently
    sup |p_eta - p_0|)."""
    if model_eta.kind not in (SFD, FD):
        raise ValueError("trajectory_distance compares a quantum model against mb")
    traj_eta = integrate(model_eta, rho0, cfg)
    traj_mb = integrate(make_model(MB), rho0, cfg)
    return float(np.max(np.abs(traj_eta.p - traj_mb.p)))


def gronwall_bound(eta: float, rho0: float) -> float:
    """(eta / 6) rho0^{8/3} e^{rho0 / 3}: the certified upper bound on
    trajectory_distance for the sfd model (response-defect constant 1)."""
    return eta / 6.0 * rho0 ** (8.0 / 3.0) * math.exp(rho0 / 3.0)
