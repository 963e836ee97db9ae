"""Arithmetic k-spheres: lattice counts, exponential sums, circle-method main terms,
spherical maximal averages on finite tori and k-spherical ergodic averages."""
from ._common import Budget, DEFAULT_BUDGET, DomainError, KSpheresError, PreconditionError, ResourceError
from .lattice import SphereSpec, count_sphere, enumerate_sphere, sphere_exp_sum, sphere_points
from .expsums import HypothesisConfig, WeylSumSpec, gauss_sum, hua_diagnostic, hypothesis_ratio, weyl_sum
from .farey import FareyArc, arc_partition, classify
from .surface import BumpFunction, QuadratureConfig, surface_ft, decay_fit, hardy_sweep
from .approx import main_term, error_scan, error_exponent_fit
from .operators import GridFunction, spherical_average, dyadic_maximal, full_maximal, lp_threshold_probe
from .ergodic import TorusSystem, TrigObservable, ergodic_average, convergence_scan, spectral_measure

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
