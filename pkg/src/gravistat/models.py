"""Gas statistics models: Maxwell-Boltzmann and the two Fermi-Dirac variants.

Each model is described by its enthalpy map H (density -> chemical
potential), the inverse F = H^{-1}, the response R = 1/H', the pressure
P with P' = z H', the entropy generating function beta = z H - P, and
the defect z - R(z) that measures how far the response deviates from
the Maxwell-Boltzmann identity.

    mb   H(z) = log z                      R(z) = z
    sfd  H(z) = log z + (3/2) eta z^{2/3}  R(z) = 1 / (1/z + eta z^{-1/3})
    fd   H(z) = finv(2 z / mu)             R(z) = (mu/4) fm(finv(2 z / mu))

where finv is the inverse of f_{1/2}, fm is f_{-1/2}, and the quantum
parameters are tied by mu^2 eta^3 = 8/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fermi import DEFAULT_CONFIG, FermiEvalConfig, fermi_eval, _invert_half

MB = "mb"
SFD = "sfd"
FD = "fd"
KINDS = (MB, SFD, FD)

_MU_ETA_PRODUCT = 8.0 / 3.0


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one statistics model."""

    kind: str
    eta: float
    mu: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if not (math.isfinite(self.eta) and self.eta >= 0.0):
            raise ValueError(f"eta must be finite and nonnegative, got {self.eta!r}")
        if self.kind == MB and self.eta != 0.0:
            raise ValueError("the mb model has no quantum parameter; eta must be 0")
        if self.kind == FD:
            if self.mu is None or self.eta <= 0.0:
                raise ValueError("the fd model requires eta > 0 with mu = sqrt(8/(3 eta^3))")
            residual = abs(self.mu * self.mu * self.eta ** 3 - _MU_ETA_PRODUCT)
            if residual > 1e-12 * _MU_ETA_PRODUCT:
                raise ValueError("fd parameters must satisfy mu^2 eta^3 = 8/3")
        elif self.mu is not None:
            raise ValueError(f"mu is only meaningful for the fd model, got kind={self.kind!r}")

    def label(self) -> str:
        return self.kind if self.eta == 0.0 else f"{self.kind} eta={self.eta:g}"


@dataclass(frozen=True)
class ThermoValues:
    """Pressure P(z) and entropy density beta(z) at one density."""

    pressure: float
    entropy_density: float


def make_model(kind: str, eta: float = 0.0) -> ModelSpec:
    """Build a ModelSpec, deriving mu from eta in the fd case."""
    kind = kind.lower()
    if kind == FD:
        if eta <= 0.0:
            raise ValueError("fd requires eta > 0 (mu is undefined at eta = 0)")
        return ModelSpec(FD, eta, math.sqrt(_MU_ETA_PRODUCT / eta ** 3))
    return ModelSpec(kind, eta)


def _check_density(z: float) -> float:
    if not (math.isfinite(z) and z > 0.0):
        raise ValueError(f"density argument must be positive and finite, got {z!r}")
    return float(z)


def enthalpy(model: ModelSpec, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG,
             x0: float | None = None) -> float:
    """H(z).  `x0` seeds the fd inversion for warm restarts."""
    z = _check_density(z)
    if model.kind == MB:
        return math.log(z)
    if model.kind == SFD:
        return math.log(z) + 1.5 * model.eta * z ** (2.0 / 3.0)
    t, _ = _invert_half(2.0 * z / model.mu, cfg, x0)
    return t


def inverse_enthalpy(model: ModelSpec, t: float,
                     cfg: FermiEvalConfig = DEFAULT_CONFIG) -> float:
    """F(t) = H^{-1}(t), defined for any finite t."""
    if not math.isfinite(t):
        raise ValueError(f"argument must be finite, got {t!r}")
    if model.kind == MB or (model.kind == SFD and model.eta == 0.0):
        try:
            return math.exp(t)
        except OverflowError:
            return math.inf
    if model.kind == FD:
        return 0.5 * model.mu * fermi_eval(0.5, t, cfg)
    return _sfd_inverse_enthalpy(model.eta, t, cfg)


def _sfd_inverse_enthalpy(eta: float, t: float, cfg: FermiEvalConfig) -> float:
    # bracketed Newton on H(z) - t; H(e^t) >= t makes e^t a natural upper
    # bracket, extended geometrically whenever the seed brackets fail
    if t <= 700.0:
        lo, hi = math.exp(t - 1.0), math.exp(t)
    else:
        zd = (2.0 * t / (3.0 * eta)) ** 1.5
        lo, hi = 0.5 * zd, 2.0 * zd
    while math.log(lo) + 1.5 * eta * lo ** (2.0 / 3.0) > t:
        hi = lo
        lo *= 0.25
    while math.log(hi) + 1.5 * eta * hi ** (2.0 / 3.0) < t:
        lo = hi
        hi *= 4.0

    tol = max(cfg.abs_tol, cfg.rel_tol * max(1.0, abs(t)))
    z = math.sqrt(lo * hi)
    for _ in range(200):
        g = math.log(z) + 1.5 * eta * z ** (2.0 / 3.0) - t
        if g > 0.0:
            hi = z
        else:
            lo = z
        if abs(g) <= tol:
            return z
        r = 1.0 / (1.0 / z + eta * z ** (-1.0 / 3.0))  # R = 1/H'
        znew = z - g * r
        if not (lo < znew < hi):
            znew = math.sqrt(lo * hi)
        if abs(znew - z) <= 1e-15 * z:
            return znew
        z = znew
    raise RuntimeError("sfd enthalpy inversion did not converge")


def response(model: ModelSpec, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG,
             x0: float | None = None) -> float:
    """R(z) = 1/H'(z); satisfies 0 <= R(z) <= z for every model."""
    z = _check_density(z)
    if model.kind == MB:
        return z
    if model.kind == SFD:
        return 1.0 / (1.0 / z + model.eta * z ** (-1.0 / 3.0))
    t, fm = _invert_half(2.0 * z / model.mu, cfg, x0)
    return 0.25 * model.mu * fm


def response_fn(model: ModelSpec,
                cfg: FermiEvalConfig = DEFAULT_CONFIG) -> Callable[[float], float]:
    """A fast R(z) callable for integration loops.

    For fd the returned closure keeps the previous inversion result as
    the Newton seed; the seed lives in the closure, so each caller gets
    independent state.
    """
    if model.kind == MB:
        return lambda z: z
    if model.kind == SFD:
        eta = model.eta
        return lambda z: 1.0 / (1.0 / z + eta * z ** (-1.0 / 3.0))

    mu = model.mu
    seed: list[float | None] = [None]

    def resp(z: float) -> float:
        t, fm = _invert_half(2.0 * z / mu, cfg, seed[0])
        seed[0] = t
        return 0.25 * mu * fm

    return resp


def thermo(model: ModelSpec, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG,
           x0: float | None = None) -> ThermoValues:
    """Pressure and entropy density at z; beta = z H(z) - P(z)."""
    z = _check_density(z)
    if model.kind == MB:
        return ThermoValues(pressure=z, entropy_density=z * math.log(z) - z)
    if model.kind == SFD:
        z53 = z ** (5.0 / 3.0)
        return ThermoValues(pressure=z + 0.6 * model.eta * z53,
                            entropy_density=z * math.log(z) - z + 0.9 * model.eta * z53)
    t, _ = _invert_half(2.0 * z / model.mu, cfg, x0)
    pressure = model.mu / 3.0 * fermi_eval(1.5, t, cfg)
    return ThermoValues(pressure=pressure, entropy_density=z * t - pressure)


def entropy_density_curve(model: ModelSpec, z_values,
                          cfg: FermiEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """beta along a density sample path; warm-starts the fd inversions."""
    z = np.asarray(z_values, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
        raise ValueError("density samples must be positive and finite")
    if model.kind == MB:
        return z * np.log(z) - z
    if model.kind == SFD:
        return z * np.log(z) - z + 0.9 * model.eta * z ** (5.0 / 3.0)
    out = np.empty_like(z)
    seed = None
    for i, zi in enumerate(z):
        t, _ = _invert_half(2.0 * zi / model.mu, cfg, seed)
        seed = t
        out[i] = zi * t - model.mu / 3.0 * fermi_eval(1.5, t, cfg)
    return out


def defect(model: ModelSpec, z: float, cfg: FermiEvalConfig = DEFAULT_CONFIG) -> float:
    """z - R(z), the deviation of the response from the mb identity.

    The sfd case uses the cancellation-free closed form
    eta z^{5/3} / (1 + eta z^{2/3}); mb is identically zero.
    """
    z = _check_density(z)
    if model.kind == MB:
        return 0.0
    if model.kind == SFD:
        return model.eta * z ** (5.0 / 3.0) / (1.0 + model.eta * z ** (2.0 / 3.0))
    return z - response(model, z, cfg)
