"""Branch tracing over a central-density grid, turning points, counting.

The map rho0 -> M(rho0) is single valued, so a plain log-spaced sweep
suffices to trace the bifurcation branch.  Turning points are the local
extrema of M along the branch; solution counting reduces to bracketing
the level crossings of M(rho0) - M_target and refining each bracket.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .energetics import free_energy
from .models import ModelSpec
from .shooting import (DEFAULT_INTEGRATOR, IntegrationError, IntegratorConfig,
                       integrate, reconstruct_profile)

class BranchError(RuntimeError):
    """Too many sweep points failed to integrate."""


@dataclass(frozen=True)
class BranchSample:
    rho0: float
    mass: float
    m: float
    sup_density: float
    multiplier: float
    entropy: float
    potential: float
    free_energy: float


@dataclass(frozen=True)
class BranchFailure:
    rho0: float
    reason: str


@dataclass
class Branch:
    model: ModelSpec | None
    samples: list[BranchSample]
    failures: list[BranchFailure] = field(default_factory=list)

    def rho0_values(self) -> np.ndarray:
        return np.array([s.rho0 for s in self.samples])

    def masses(self) -> np.ndarray:
        return np.array([s.mass for s in self.samples])


@dataclass(frozen=True)
class TurningPoint:
    index: int                         # 1-based position within its sequence
    mass: float
    rho0: float
    rho0_bracket: tuple[float, float]  # grid interval the extremum came from


@dataclass
class TurningPointSet:
    lower: list[TurningPoint]          # local minima of M along the branch
    upper: list[TurningPoint]          # local maxima


@dataclass
class SolutionCount:
    count: int
    roots: list[float]
    unresolved: list[tuple[float, float]]

    @property
    def lower_bound_only(self) -> bool:
        return bool(self.unresolved)


def _evaluate_point(model: ModelSpec, rho0: float,
                    cfg: IntegratorConfig) -> BranchSample:
    traj = integrate(model, rho0, cfg)
    profile = reconstruct_profile(traj)
    report = free_energy(model, traj)
    return BranchSample(rho0=rho0, mass=profile.mass, m=profile.m,
                        sup_density=profile.sup_density,
                        multiplier=profile.multiplier,
                        entropy=report.entropy, potential=report.potential,
                        free_energy=report.free_energy)


def _point_task(args) -> tuple[float, BranchSample | None, str | None]:
    model, rho0, cfg = args
    try:
        return rho0, _evaluate_point(model, rho0, cfg), None
    except (IntegrationError, ValueError) as exc:
        return rho0, None, str(exc)


def _worker_count() -> int:
    raw = os.environ.get("GRAVISTAT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def trace_branch(model: ModelSpec, rho0_min: float, rho0_max: float,
                 points: int, cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                 workers: int | None = None) -> Branch:
    """Sweep a log-spaced rho0 grid; failed points are recorded, and more
    than 10% of failures aborts with BranchError."""
    if not (0.0 < rho0_min < rho0_max):
        raise ValueError("need 0 < rho0_min < rho0_max")
    if points < 2:
        raise ValueError("points must be at least 2")
    grid = np.geomspace(rho0_min, rho0_max, points)
    tasks = [(model, float(r), cfg) for r in grid]

    workers = _worker_count() if workers is None else max(1, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_point_task, tasks, chunksize=8))
    else:
        results = [_point_task(t) for t in tasks]

    branch = Branch(model=model, samples=[], failures=[])
    for rho0, sample, err in results:
        if sample is None:
            branch.failures.append(BranchFailure(rho0=rho0, reason=err))
        else:
            branch.samples.append(sample)
    if len(branch.failures) > 0.10 * points:
        failing = ", ".join(f"{f.rho0:g}" for f in branch.failures[:10])
        raise BranchError(
            f"{len(branch.failures)}/{points} sweep points failed "
            f"(first failing rho0 values: {failing})")
    return branch


def mass_at(model: ModelSpec, rho0: float,
            cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> float:
    """Total mass of the solution with central density rho0."""
    traj = integrate(model, rho0, cfg)
    return 4.0 * math.pi * float(traj.q[-1])


def _refine_extremum(model: ModelSpec, a: float, b: float, sign: float,
                     cfg: IntegratorConfig, rel_tol: float) -> tuple[float, float]:
    """Extremum of sign*M on [a, b], searched in log(rho0) with bounded
    Brent iteration (parabolic fits with golden-section safeguarding) on
    freshly integrated masses; returns (rho0, M) at the extremum."""
    res = minimize_scalar(lambda l: -sign * mass_at(model, math.exp(l), cfg),
                          bounds=(math.log(a), math.log(b)), method="bounded",
                          options={"xatol": rel_tol})
    rho0 = math.exp(float(res.x))
    return rho0, sign * -float(res.fun)


def detect_turning_points(branch: Branch, cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                          refine_rel_tol: float = 1e-6) -> TurningPointSet:
    """Locate local extrema of M over the branch grid.

    Candidates come from sign changes of the finite-difference slope and
    are classified by the sign of the second difference (maxima vs
    minima), so sparse grids cannot swap the labels.  Each candidate is
    sharpened on freshly integrated masses by safeguarded parabolic
    fitting (bounded Brent) until the rho0 interval is below
    `refine_rel_tol` in relative width.
    """
    if len(branch.samples) < 3:
        raise ValueError("turning point detection needs at least 3 branch samples")
    r = branch.rho0_values()
    if np.any(np.diff(r) <= 0.0):
        raise ValueError("branch grid must be strictly increasing in rho0")
    mass = branch.masses()
    model = branch.model
    if model is None:
        raise ValueError("branch carries no model; cannot re-integrate")

    lower: list[TurningPoint] = []
    upper: list[TurningPoint] = []
    d = np.diff(mass)
    for i in range(1, len(mass) - 1):
        if d[i - 1] == 0.0 or d[i] == 0.0 or (d[i - 1] > 0.0) == (d[i] > 0.0):
            continue
        second = mass[i - 1] - 2.0 * mass[i] + mass[i + 1]
        is_max = second < 0.0
        a, b = float(r[i - 1]), float(r[i + 1])
        rho0_ref, mass_ref = _refine_extremum(model, a, b, 1.0 if is_max else -1.0,
                                              cfg, refine_rel_tol)
        point = TurningPoint(index=0, mass=mass_ref, rho0=rho0_ref,
                             rho0_bracket=(a, b))
        (upper if is_max else lower).append(point)

    lower = [TurningPoint(n + 1, t.mass, t.rho0, t.rho0_bracket)
             for n, t in enumerate(lower)]
    upper = [TurningPoint(n + 1, t.mass, t.rho0, t.rho0_bracket)
             for n, t in enumerate(upper)]
    return TurningPointSet(lower=lower, upper=upper)


def refine_root(model: ModelSpec, mass_target: float,
                rho0_bracket: tuple[float, float],
                cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                f_lo: float | None = None, f_hi: float | None = None,
                rel_tol: float = 1e-8) -> float:
    """Solve M(rho0) = mass_target inside a sign-changing bracket with a
    bisection/secant hybrid, to `rel_tol` relative accuracy in rho0."""
    a, b = float(rho0_bracket[0]), float(rho0_bracket[1])
    if not (a < b):
        raise ValueError(f"degenerate bracket {rho0_bracket!r}")
    fa = (mass_at(model, a, cfg) if f_lo is None else f_lo) - mass_target
    fb = (mass_at(model, b, cfg) if f_hi is None else f_hi) - mass_target
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise ValueError(
            f"M - mass_target does not change sign over {rho0_bracket!r}")
    for _ in range(200):
        if (b - a) <= rel_tol * b:
            break
        mid = 0.5 * (a + b)
        if fb != fa:
            secant = (a * fb - b * fa) / (fb - fa)
            width = b - a
            if a + 0.01 * width < secant < b - 0.01 * width:
                mid = secant
        fm = mass_at(model, mid, cfg) - mass_target
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def count_solutions(branch: Branch, mass_target: float,
                    cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> SolutionCount:
    """Count distinct rho0 with M(rho0) = mass_target along the branch.

    Every sign change of M - mass_target between adjacent samples is
    refined; roots closer than 1e-6 relative are merged.  A bracket whose
    refinement fails is reported in `unresolved`, which flags the count
    as a lower bound.
    """
    if not (mass_target > 0.0):
        raise ValueError("mass_target must be positive")
    samples = branch.samples
    if len(samples) < 2:
        raise ValueError("need at least 2 branch samples")
    model = branch.model
    roots: list[float] = []
    unresolved: list[tuple[float, float]] = []
    for left, right in zip(samples, samples[1:]):
        fl = left.mass - mass_target
        fr = right.mass - mass_target
        if fl == 0.0:
            roots.append(left.rho0)
            continue
        if (fl > 0.0) == (fr > 0.0) or fr == 0.0:
            continue
        try:
            roots.append(refine_root(model, mass_target, (left.rho0, right.rho0),
                                     cfg, f_lo=left.mass, f_hi=right.mass))
        except (IntegrationError, ValueError):
            unresolved.append((left.rho0, right.rho0))
    if samples[-1].mass == mass_target:
        roots.append(samples[-1].rho0)

    roots.sort()
    deduped: list[float] = []
    for root in roots:
        if not deduped or (root - deduped[-1]) > 1e-6 * root:
            deduped.append(root)
    return SolutionCount(count=len(deduped), roots=deduped, unresolved=unresolved)
