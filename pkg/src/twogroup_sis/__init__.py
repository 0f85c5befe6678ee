"""SIS epidemic model with two dissimilar infective groups, varying population.

The package computes the threshold R0, locates and classifies every rest
point of the proportions dynamics, integrates the absolute, proportions
and planar systems with an embedded Runge-Kutta pair, and numerically
certifies the qualitative structure (threshold dichotomy, absence of
cycles via a Dulac-type field, global attraction).

The integration kernel is compiled (Cython) when available, with an
equivalent pure-Python fallback; ``backend_name()`` reports which one is
active and TWOGROUP_SIS_PURE_PYTHON=1 forces the fallback.
"""

from ._backend import backend_name
from .analysis import (
    BasinCell,
    BasinReport,
    SweepRow,
    basin_probe,
    core_group_decomposition,
    dulac_curl,
    dulac_field,
    threshold_sweep,
)
from .equilibria import (
    QuadraticForm,
    RestPoint,
    StabilityClass,
    all_rest_points,
    classify_origin,
    endemic_equilibrium,
    equilibrium_quadratic,
    equilibrium_ray,
    origin_matrix,
)
from .errors import ConfigError, DomainError, InternalError, ParameterError
from .integrate import (
    ConvergenceOutcome,
    IntegratorConfig,
    InvarianceReport,
    TerminalReason,
    Trajectory,
    detect_convergence,
    integrate,
    invariance_audit,
    trajectory_to_csv,
)
from .model import (
    SIMPLEX_TOL,
    AbsoluteState,
    Matrix2,
    ModelParams,
    PlanarState,
    ProportionState,
    jacobian_planar,
    planar_to_simplex,
    r0,
    simplex_to_planar,
    total_population_rate,
    vf_absolute,
    vf_planar,
    vf_proportions,
)
from .verify import CheckResult, run_verification

__version__ = "0.1.0"

__all__ = [
    "AbsoluteState", "BasinCell", "BasinReport", "CheckResult", "ConfigError",
    "ConvergenceOutcome", "DomainError", "IntegratorConfig", "InternalError",
    "InvarianceReport", "Matrix2", "ModelParams", "ParameterError",
    "PlanarState", "ProportionState", "QuadraticForm", "RestPoint",
    "SIMPLEX_TOL", "StabilityClass", "SweepRow", "TerminalReason",
    "Trajectory", "all_rest_points", "backend_name", "basin_probe",
    "classify_origin", "core_group_decomposition", "detect_convergence",
    "dulac_curl", "dulac_field", "endemic_equilibrium",
    "equilibrium_quadratic", "equilibrium_ray", "integrate",
    "invariance_audit", "jacobian_planar", "origin_matrix",
    "planar_to_simplex", "r0", "run_verification", "simplex_to_planar",
    "threshold_sweep", "total_population_rate", "trajectory_to_csv",
    "vf_absolute", "vf_planar", "vf_proportions", "__version__",
]
