"""Power series (J_p) summability and Korovkin-type approximation on the torus."""

from .errors import (BudgetExceeded, CutoffExceeded, JpError, MissingBound, NoAdmissibleDelta,
                     QuadratureError)
from .fourier import CoeffTable, abel_poisson_mean, coeffs, partial_sum, poisson_kernel
from .korovkin import (OperatorFamily, basic_condition_probe, gamma, identity_family,
                       jp_average, theorem1_errors, theorem1_pointwise_check,
                       theorem2_bound_check)
from .paper_example import (classical_failure_table, closed_error, closed_gamma_series,
                            paper_operator)
from .periodic import Fn2D, Grid2D, modulus, phi_at, sup_norm, test_function
from .summability import (DoubleSeq, MethodPoint, WeightFamily, abel, b_regularity_residuals,
                          eval_p, logarithmic, pringsheim_probe, ps_transform)

__all__ = [
    "BudgetExceeded", "CoeffTable", "CutoffExceeded", "DoubleSeq", "Fn2D", "Grid2D",
    "JpError", "MethodPoint", "MissingBound", "NoAdmissibleDelta", "OperatorFamily",
    "QuadratureError", "WeightFamily", "abel", "abel_poisson_mean", "b_regularity_residuals",
    "basic_condition_probe", "classical_failure_table", "closed_error", "closed_gamma_series",
    "coeffs", "eval_p", "gamma", "identity_family", "jp_average", "logarithmic", "modulus",
    "paper_operator", "partial_sum", "phi_at", "poisson_kernel", "pringsheim_probe",
    "ps_transform", "sup_norm", "test_function", "theorem1_errors",
    "theorem1_pointwise_check", "theorem2_bound_check",
]
