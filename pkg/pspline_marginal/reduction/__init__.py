from pspline_marginal.reduction.reduce import (
    CovariateBlock,
    ReducedVector,
    ReductionMethod,
    TrimResult,
    glm_linear_predictor,
    pca_first_component,
    project_reduction,
    reduce_block,
    rescale_unit,
    trim_extremes,
)

__all__ = [
    "CovariateBlock",
    "ReducedVector",
    "ReductionMethod",
    "TrimResult",
    "glm_linear_predictor",
    "pca_first_component",
    "project_reduction",
    "reduce_block",
    "rescale_unit",
    "trim_extremes",
]
