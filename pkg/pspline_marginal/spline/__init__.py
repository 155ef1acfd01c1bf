from pspline_marginal.spline.basis import (
    BasisConvention,
    BasisMatrix,
    BasisSpec,
    KnotVector,
    covariate_basis,
    eval_basis,
    make_knot_vector,
    second_difference_matrix,
)
from pspline_marginal.spline.design import (
    DesignMatrix,
    Layout,
    LayoutKind,
    PenaltyPair,
    build_additive_design,
    build_design,
    build_interaction_design,
    build_roughness,
    build_univariate_design,
    design_values,
    structural_null_directions,
)

__all__ = [
    "BasisConvention",
    "BasisMatrix",
    "BasisSpec",
    "DesignMatrix",
    "KnotVector",
    "Layout",
    "LayoutKind",
    "PenaltyPair",
    "build_additive_design",
    "build_design",
    "build_interaction_design",
    "build_roughness",
    "build_univariate_design",
    "covariate_basis",
    "design_values",
    "eval_basis",
    "make_knot_vector",
    "second_difference_matrix",
    "structural_null_directions",
]
