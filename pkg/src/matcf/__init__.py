"""Matrix continued fractions and a continued-fraction matrix error function."""

from .cfengine import (
    CFGenerator,
    CFTerm,
    ConvergentState,
    DiagnosticReport,
    EvaluationReport,
    NormTooLargeError,
    Termination,
    convergent,
    equivalent_scale,
    evaluate,
    iter_convergents,
    nested_value,
    neumann_bound,
    positive_divergence_diagnostic,
    seed,
    step,
    to_ordinary,
    worpitzky_diagnostic,
)
from .erf import (
    ErfCFSpec,
    convergent_table,
    erf_cf_terms,
    erf_matrix,
    erf_matrix_taylor,
    erf_scalar,
    erf_scalar_taylor,
)
from .eulercf import TaylorSeries, ZeroCoefficientError, taylor_eval, taylor_to_cf
from .matcore import DimensionError, MatrixError, SingularMatrixError, as_matrix, inf_norm, invert

__version__ = "0.1.0"
