"""Membrane-coupled elliptic eigenvalue and logistic steady-state solver.

Two subdomains meet at an interface through which flux is exchanged
proportionally to the concentration jump.  The package assembles P1 finite
element operators for that coupling, computes principal eigenvalues and
unique positive steady states, and sweeps parameters against the
closed-form limits the problem admits.
"""

from .assembly import (OperatorPair, SingularOperator, assemble_membrane,
                       assemble_scalar, solve_forced)
from .asymptotics import (HCurve, ResolutionError, SweepTable, balanced_constant,
                          h_value, reaction_profile, small_d_limit,
                          sweep_eigen_d, sweep_lambda1, sweep_logistic_d,
                          sweep_theta_over_lambda, trace_h, weighted_mean_limit,
                          write_hcurve_csv, write_sweep_csv)
from .checks import (CheckReport, bound_suite, mms_convergence, picone_refinement,
                     picone_residual, run_all)
from .config import ConfigError, RunConfig, config_from_dict, load_config
from .eigen import (EigenPair, NonPositiveEigenvector, lambda1, principal_pair,
                    principal_scalar, sigma_uncoupled)
from .fields import (BoundaryCondition, CoefField, PairField, RobinSpec,
                     constant_field, constant_pair, field_from_function,
                     field_rows, integrate, pair_sup_distance, positive_part)
from .geometry import (Geometry, GeometrySpec, InvalidBounds, TooFewNodes,
                       build_geometry, concentric_radial, refine, two_interval)
from .logistic import (BlowupFit, FitFailed, LargeSolutionResult, LogisticResult,
                       NegativeIterate, approximate_large_solution,
                       solve_logistic_membrane, solve_logistic_scalar)

__version__ = "0.1.0"

__all__ = [
    "OperatorPair", "SingularOperator", "assemble_membrane", "assemble_scalar",
    "solve_forced",
    "HCurve", "ResolutionError", "SweepTable", "balanced_constant", "h_value",
    "reaction_profile", "small_d_limit", "sweep_eigen_d", "sweep_lambda1",
    "sweep_logistic_d", "sweep_theta_over_lambda", "trace_h",
    "weighted_mean_limit", "write_hcurve_csv", "write_sweep_csv",
    "CheckReport", "bound_suite", "mms_convergence", "picone_refinement",
    "picone_residual", "run_all",
    "ConfigError", "RunConfig", "config_from_dict", "load_config",
    "EigenPair", "NonPositiveEigenvector", "lambda1", "principal_pair",
    "principal_scalar", "sigma_uncoupled",
    "BoundaryCondition", "CoefField", "PairField", "RobinSpec",
    "constant_field", "constant_pair", "field_from_function", "field_rows",
    "integrate", "pair_sup_distance", "positive_part",
    "Geometry", "GeometrySpec", "InvalidBounds", "TooFewNodes",
    "build_geometry", "concentric_radial", "refine", "two_interval",
    "BlowupFit", "FitFailed", "LargeSolutionResult", "LogisticResult",
    "NegativeIterate", "approximate_large_solution", "solve_logistic_membrane",
    "solve_logistic_scalar",
    "__version__",
]
