"""Entropy, potential energy and free energy along a trajectory.

With beta the entropy generating function of the model and phi the
self-consistent potential, the functionals reduce to one-dimensional
integrals over the trajectory samples:

    S   = 4 pi int e^{3s} beta(p(s)) ds
    Pot = 2 pi int e^{5s} q(s)^2 ds          (= one half int |grad phi|^2)
    F   = S - Pot

The 2 pi prefactor follows from the radial substitution in
(1/2) int |grad phi|^2 with phi' = zeta / r^2.  A doubled variant
(4 pi prefactor) is available for comparison with conventions that
drop the one-half factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np
from scipy.integrate import simpson

from .models import ModelSpec, entropy_density_curve
from .shooting import Trajectory


@dataclass(frozen=True)
class EnergyReport:
    entropy: float
    potential: float
    free_energy: float


def _require_complete(traj: Trajectory) -> None:
    if not traj.complete:
        raise ValueError("trajectory does not reach s = 0")


def entropy(model: ModelSpec, traj: Trajectory) -> float:
    """Generalized entropy 4 pi int e^{3s} beta(p) ds on the dense grid."""
    _require_complete(traj)
    beta = entropy_density_curve(model, traj.p)
    return 4.0 * pi * float(simpson(np.exp(3.0 * traj.s) * beta, x=traj.s))


def potential_energy(traj: Trajectory, doubled: bool = False) -> float:
    """Self-consistent potential energy 2 pi int e^{5s} q^2 ds; `doubled`
    switches to the 4 pi normalization."""
    _require_complete(traj)
    prefactor = 4.0 * pi if doubled else 2.0 * pi
    return prefactor * float(simpson(np.exp(5.0 * traj.s) * traj.q ** 2, x=traj.s))


def free_energy(model: ModelSpec, traj: Trajectory,
                doubled_potential: bool = False) -> EnergyReport:
    """Free energy report with F = S - Pot as a single subtraction."""
    s_val = entropy(model, traj)
    pot = potential_energy(traj, doubled=doubled_potential)
    return EnergyReport(entropy=s_val, potential=pot, free_energy=s_val - pot)
