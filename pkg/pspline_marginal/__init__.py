__version__ = "0.1.0"

from pspline_marginal.core import logger
from pspline_marginal.models import (
    PenalizedProblem,
    build_kernel,
    fit0,
    fit1,
    fit2,
    newton_raphson,
    true_marginal_oracle,
)
from pspline_marginal.spline import (
    BasisSpec,
    build_additive_design,
    build_interaction_design,
    build_roughness,
    eval_basis,
)

__all__ = [
    "BasisSpec",
    "PenalizedProblem",
    "__version__",
    "build_additive_design",
    "build_interaction_design",
    "build_kernel",
    "build_roughness",
    "eval_basis",
    "fit0",
    "fit1",
    "fit2",
    "logger",
    "newton_raphson",
    "true_marginal_oracle",
]
