"""Finite-dimensional laboratory for almost-orthogonality operator-norm bounds."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundReport,
    OperatorFamily,
    VerificationResult,
    absolute_value_bound,
    cotlar_stein_bound,
    full_report,
    improved_bound,
    positive_sum_bound,
    refined_bound,
    schur_test_bound,
)
from .config import DEFAULT, Tolerances  # noqa: E402

__all__ = [
    "BoundReport",
    "DEFAULT",
    "OperatorFamily",
    "Tolerances",
    "VerificationResult",
    "absolute_value_bound",
    "cotlar_stein_bound",
    "full_report",
    "improved_bound",
    "positive_sum_bound",
    "refined_bound",
    "schur_test_bound",
]
