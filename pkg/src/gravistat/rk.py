"""Embedded Dormand-Prince 5(4) integrator for two-component systems.

Plain-float implementation with PI stepsize control, tuned for the small
stiff-free systems integrated here.  Steps are clipped so that every
requested output abscissa is hit exactly by an accepted step; no
interpolation is involved in the returned samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)

# PI controller constants (order 5, error estimator order 4)
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 10.0

DONE = "done"
STOPPED = "stopped"
MAX_STEPS = "max_steps"
STALLED = "stalled"

Rhs = Callable[[float, float, float], tuple[float, float]]


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    rhs_evals: int


@dataclass
class Dp45Result:
    status: str
    us: list[float]
    vs: list[float]
    n_filled: int          # how many grid points were reached
    stats: StepStats
    stop_state: tuple[float, float, float] | None = None


def dp45(rhs: Rhs, grid: Sequence[float], u0: float, v0: float, *,
         rtol: float, atol: float, max_steps: int,
         accept_hook: Callable[[float, float, float], tuple[float, float]] | None = None,
         stop: Callable[[float, float, float], bool] | None = None) -> Dp45Result:
    """Integrate rhs over grid[0] .. grid[-1], recording states at every
    grid point.  The grid must be strictly monotone; integration runs in
    its direction.  `accept_hook` may adjust each accepted state (e.g.
    clamping); `stop` ends integration early when it returns True."""
    t = float(grid[0])
    t_end = float(grid[-1])
    direction = 1.0 if t_end >= t else -1.0
    u, v = float(u0), float(v0)

    f0u, f0v = rhs(t, u, v)
    nfev = 1
    d0 = max(abs(u), abs(v), 1e-30)
    d1 = max(abs(f0u), abs(f0v), 1e-30)
    h = direction * min(abs(t_end - t), max(1e-8, 0.01 * d0 / d1 * rtol ** 0.25))

    us, vs = [u], [v]
    i_next = 1
    facold = 1e-4
    nacc = nrej = 0
    tiny = 2.3e-16

    while i_next < len(grid):
        if nacc + nrej >= max_steps:
            return Dp45Result(MAX_STEPS, us, vs, i_next, StepStats(nacc, nrej, nfev))
        if abs(h) < 16.0 * tiny * max(1.0, abs(t)):
            return Dp45Result(STALLED, us, vs, i_next, StepStats(nacc, nrej, nfev))
        target = grid[i_next]
        clipped = direction * (t + h - target) >= 0.0
        if clipped:
            h = target - t

        k1u, k1v = f0u, f0v
        k2u, k2v = rhs(t + _C2 * h, u + h * (_A21 * k1u), v + h * (_A21 * k1v))
        k3u, k3v = rhs(t + _C3 * h, u + h * (_A31 * k1u + _A32 * k2u),
                       v + h * (_A31 * k1v + _A32 * k2v))
        k4u, k4v = rhs(t + _C4 * h, u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
                       v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v))
        k5u, k5v = rhs(t + _C5 * h,
                       u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
                       v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v))
        k6u, k6v = rhs(t + h,
                       u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
                       v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v))
        unew = u + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        vnew = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        k7u, k7v = rhs(t + h, unew, vnew)
        nfev += 6

        eu = h * (_E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u)
        ev = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        su = atol + rtol * max(abs(u), abs(unew))
        sv = atol + rtol * max(abs(v), abs(vnew))
        err = (0.5 * ((eu / su) ** 2 + (ev / sv) ** 2)) ** 0.5

        if err <= 1.0:
            nacc += 1
            t = target if clipped else t + h
            u, v = unew, vnew
            f0u, f0v = k7u, k7v
            if accept_hook is not None:
                u2, v2 = accept_hook(t, u, v)
                if u2 != u or v2 != v:
                    u, v = u2, v2
                    f0u, f0v = rhs(t, u, v)  # state changed: refresh FSAL stage
                    nfev += 1
            if clipped:
                us.append(u)
                vs.append(v)
                i_next += 1
            if stop is not None and stop(t, u, v):
                return Dp45Result(STOPPED, us, vs, i_next,
                                  StepStats(nacc, nrej, nfev), (t, u, v))
            fac = _SAFETY * err ** -_ALPHA * facold ** _BETA if err > 0.0 else _FAC_MAX
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
            facold = max(err, 1e-4)
        else:
            nrej += 1
            h *= max(_FAC_MIN, _SAFETY * err ** -0.2)

    return Dp45Result(DONE, us, vs, len(grid), StepStats(nacc, nrej, nfev))
