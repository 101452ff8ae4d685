"""Radial equilibria of a self-gravitating gas on the unit ball.

Shooting integration of the cumulated-mass system, bifurcation-branch
tracing over the central density, turning-point detection, solution
counting for a prescribed mass, and entropy / potential / free-energy
evaluation, for Maxwell-Boltzmann, simplified Fermi-Dirac and full
Fermi-Dirac statistics.
"""

from .branch import (Branch, BranchError, BranchSample, SolutionCount,
                     TurningPoint, TurningPointSet, count_solutions,
                     detect_turning_points, mass_at, refine_root, trace_branch)
from .energetics import EnergyReport, entropy, free_energy, potential_energy
from .fermi import (FermiAccuracyError, FermiDomainError, FermiEvalConfig,
                    fermi_derivative, fermi_eval, fermi_inverse_half)
from .models import (FD, KINDS, MB, SFD, ModelSpec, ThermoValues, defect,
                     enthalpy, inverse_enthalpy, make_model, response,
                     response_fn, thermo)
from .shooting import (IntegrationError, IntegratorConfig,
                       NumericalBreakdownError, SolutionProfile, Trajectory,
                       gronwall_bound, initial_state, integrate, integrate_xy,
                       reconstruct_profile, trajectory_distance)
from .validation import (CheckReport, check_mass_estimates,
                         check_quadrant_exit, check_trajectory_invariants,
                         run_standard_checks, standard_matrix)

__version__ = "0.1.0"
