"""Positive linear operators, their characteristic functions and limit laws."""

from .charfun import CharfunSpec, charfun_closed, charfun_series
from .convergence import (LAMBDAS, ConvergenceReport, ExperimentSpec, levy_scan, limit_value, lhs_value,
                          run_experiment)
from .errors import (DomainError, FitError, GuardError, ModeError, NonConvergenceError, NumericFailure,
                     ParseError, PosopError, QuadratureError, UnsupportedFamilyError)
from .expression import Expression, parse_expression
from .laws import (LawResidual, discrete_scaling_residual, integral_scaling_residual,
                   kernel_homogeneity_residual, phi_residual)
from .numerics import QuadratureSpec, TruncationPolicy
from .operators import (FunctionHandle, OperatorSpec, apply, apply_bernstein_schnabl, apply_discrete,
                        apply_gamma, apply_lototsky, apply_weierstrass, constant)
from .weights import WeightFamily, node, weight, weight_table

__version__ = "0.1.0"

__all__ = [
    "CharfunSpec", "charfun_closed", "charfun_series",
    "LAMBDAS", "ConvergenceReport", "ExperimentSpec", "levy_scan", "limit_value", "lhs_value", "run_experiment",
    "DomainError", "FitError", "GuardError", "ModeError", "NonConvergenceError", "NumericFailure",
    "ParseError", "PosopError", "QuadratureError", "UnsupportedFamilyError",
    "Expression", "parse_expression",
    "LawResidual", "discrete_scaling_residual", "integral_scaling_residual", "kernel_homogeneity_residual",
    "phi_residual",
    "QuadratureSpec", "TruncationPolicy",
    "FunctionHandle", "OperatorSpec", "apply", "apply_bernstein_schnabl", "apply_discrete", "apply_gamma",
    "apply_lototsky", "apply_weierstrass", "constant",
    "WeightFamily", "node", "weight", "weight_table",
]
