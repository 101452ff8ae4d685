"""Complete Fermi-Dirac integrals of half-integer order.

Evaluates f_a(z) = int_0^inf x^a / (1 + exp(x - z)) dx for the three
orders a in {-1/2, 1/2, 3/2}, inverts f_{1/2}, and provides the
derivative recurrence d/dz f_a(z) = a * f_{a-1}(z).

The integrand has a smooth but kink-like transition near x = z, so the
integral is split at x = max(z, 0): the head is handled by adaptive
Gauss-Kronrod quadrature, the tail is truncated where the analytic
envelope x^a * exp(z - x) pushes the remainder below a tenth of the
absolute tolerance.  Deep in the Boltzmann tail (z < -25) quadrature is
replaced by the alternating series

    f_a(z) = Gamma(a+1) * sum_{k>=1} (-1)^(k+1) exp(k z) / k^(a+1),

truncated when a term drops below a tenth of the absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

SUPPORTED_ORDERS = (-0.5, 0.5, 1.5)
DERIVATIVE_ORDERS = (0.5, 1.5)

_GAMMA_A1 = {-0.5: math.gamma(0.5), 0.5: math.gamma(1.5), 1.5: math.gamma(2.5)}
_SERIES_CUTOFF = -25.0
_MAX_SERIES_TERMS = 500


class FermiDomainError(ValueError):
    """Argument outside the domain of the requested operation."""


class FermiAccuracyError(RuntimeError):
    """Quadrature failed to meet the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class FermiEvalConfig:
    """Accuracy targets for Fermi integral evaluation."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol >= 0.0 and self.rel_tol >= 0.0):
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol + self.rel_tol <= 0.0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")


DEFAULT_CONFIG = FermiEvalConfig()


def _check_order(order: float, allowed=SUPPORTED_ORDERS) -> float:
    if order not in allowed:
        raise FermiDomainError(f"unsupported order {order!r}; expected one of {allowed}")
    return float(order)


def _series_tail(alpha: float, z: float, tol: float) -> float:
    # alternating Boltzmann-tail series; terms decay by a factor e^z < e^-25
    g = _GAMMA_A1[alpha]
    total = 0.0
    for k in range(1, _MAX_SERIES_TERMS + 1):
        term = (-1.0) ** (k + 1) * math.exp(k * z) / k ** (alpha + 1.0)
        total += term
        if abs(term) * g < tol:
            return g * total
    raise FermiAccuracyError("tail series did not converge", abs(term) * g)


def fermi_eval(order: float, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG) -> float:
    """Evaluate the complete Fermi-Dirac integral f_order(z).

    Parameters
    ----------
    order : one of -1/2, 1/2, 3/2
    z : finite real argument
    cfg : accuracy configuration; the result carries absolute error at
        most max(cfg.abs_tol, cfg.rel_tol * |result|).

    The result is positive and strictly increasing in z.
    """
    alpha = _check_order(order)
    if not math.isfinite(z):
        raise FermiDomainError(f"argument must be finite, got {z!r}")
    if z < _SERIES_CUTOFF:
        return _series_tail(alpha, z, cfg.abs_tol / 10.0)

    split = max(z, 0.0)
    # drive the absolute target with the Boltzmann envelope so tiny values
    # near the series cutoff keep relative accuracy too; the contractual
    # max(abs_tol, rel_tol * |result|) is enforced on the combined result
    magnitude = _GAMMA_A1[alpha] * math.exp(min(z, 0.0))
    epsabs = 0.25 * (cfg.rel_tol * magnitude if cfg.rel_tol > 0.0 else cfg.abs_tol)
    epsrel = 0.25 * max(cfg.rel_tol, 1e-14)

    hi = split + 35.0
    while hi ** alpha * math.exp(z - hi) * 2.0 > cfg.abs_tol / 10.0:
        hi += 10.0

    # keep the Fermi edge (transition of width O(1) around x = z) an
    # interior feature of its own segment; for large z the edge would
    # otherwise hide from the quadrature nodes at the head's far end
    cuts = sorted({0.0, max(z - 40.0, 0.0), split, hi})
    total = 0.0
    achieved = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            part, err = _segment(alpha, z, a, b, epsabs, epsrel, cfg)
            total += part
            achieved += err

    allowed = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    if achieved > allowed:
        raise FermiAccuracyError("quadrature tolerance not met", achieved)
    return total


def _segment(alpha, z, a, b, epsabs, epsrel, cfg) -> tuple[float, float]:
    if alpha == -0.5:
        # x = u^2 removes the integrable endpoint singularity exactly
        def g(u: float) -> float:
            return 2.0 / (1.0 + math.exp(u * u - z))

        return _quad_checked(g, math.sqrt(a), math.sqrt(b), epsabs, epsrel, cfg)

    def f(x: float) -> float:
        return x ** alpha / (1.0 + math.exp(x - z))

    return _quad_checked(f, a, b, epsabs, epsrel, cfg)


def _quad_checked(f, a, b, epsabs, epsrel, cfg) -> tuple[float, float]:
    # full_output suppresses the non-convergence warning; the achieved
    # error estimate is judged against the caller's contract instead
    out = quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
               limit=cfg.max_subdivisions, full_output=1)
    return out[0], out[1]


def fermi_derivative(order: float, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG) -> float:
    """d/dz f_order(z), computed via the recurrence f'_a = a * f_{a-1}."""
    alpha = _check_order(order, DERIVATIVE_ORDERS)
    return alpha * fermi_eval(alpha - 1.0, z, cfg)


def fermi_inverse_half(v: float, cfg: FermiEvalConfig = DEFAULT_CONFIG,
                       x0: float | None = None) -> float:
    """Solve f_{1/2}(z) = v for z; v must be positive.

    Bracketed Newton iteration: the initial bracket comes from the two
    asymptotic branches (Boltzmann below, degenerate above), Newton steps
    use f'_{1/2} = f_{-1/2} / 2 and fall back to bisection once three
    proposals leave the bracket.  `x0` seeds the iteration, which lets
    repeated nearby inversions converge in one or two steps.
    """
    z, _ = _invert_half(v, cfg, x0)
    return z


def _invert_half(v: float, cfg: FermiEvalConfig,
                 x0: float | None = None) -> tuple[float, float]:
    """Invert f_{1/2} at v; returns (z, f_{-1/2}(z)) so callers that need
    the response derivative can reuse the last evaluation."""
    if not math.isfinite(v) or v <= 0.0:
        raise FermiDomainError(f"inverse requires a positive finite value, got {v!r}")
    g = _GAMMA_A1[0.5]
    lo = math.log(v / g)             # f(lo) < v: f_a(z) < Gamma(a+1) e^z
    hi = max(lo + 1.0, (1.5 * v) ** (2.0 / 3.0))
    while fermi_eval(0.5, hi, cfg) < v:
        lo = hi
        hi = 2.0 * hi + 1.0

    # relative f-tolerance keeps the z-error at the rel_tol level across
    # the Boltzmann tail, where f' ~ f makes absolute slack in f huge in z
    tol = cfg.rel_tol * v if cfg.rel_tol > 0.0 else cfg.abs_tol
    z = x0 if (x0 is not None and lo < x0 < hi) else 0.5 * (lo + hi)
    failed_newton = 0
    for _ in range(200):
        f = fermi_eval(0.5, z, cfg) - v
        if f > 0.0:
            hi = z
        else:
            lo = z
        df = 0.5 * fermi_eval(-0.5, z, cfg)
        if abs(f) <= tol:
            return z, 2.0 * df
        if failed_newton < 3:
            znew = z - f / df
            if not (lo < znew < hi):
                failed_newton += 1
                znew = 0.5 * (lo + hi)
        else:
            znew = 0.5 * (lo + hi)
        if abs(znew - z) <= 1e-15 * max(1.0, abs(z)):
            return znew, 2.0 * df
        z = znew
    raise FermiAccuracyError("inversion did not converge", abs(f))
