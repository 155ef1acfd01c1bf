from pspline_marginal.tuning.contracts import (
    Lambda2Rule,
    LambdaGrid,
    SelectionMetric,
    TracePoint,
    TuningReport,
)
from pspline_marginal.tuning.cross_validation import (
    CrossValidationResult,
    Lambda2Selection,
    auc,
    kfold_cv_lambda1,
    select_lambda2,
)
from pspline_marginal.tuning.search import BatchTuning, sequential_search, tune_batch

__all__ = [
    "BatchTuning",
    "CrossValidationResult",
    "Lambda2Rule",
    "Lambda2Selection",
    "LambdaGrid",
    "SelectionMetric",
    "TracePoint",
    "TuningReport",
    "auc",
    "kfold_cv_lambda1",
    "select_lambda2",
    "sequential_search",
    "tune_batch",
]
