from pspline_marginal.models.contracts import LinearFit, LogisticFit, ModelId, NewtonConfig
from pspline_marginal.models.linalg import solve_symmetric
from pspline_marginal.models.linear import fit0, fit1, fit2, penalized_sum_of_squares
from pspline_marginal.models.logistic import (
    MarginalPenalty,
    RoughnessPenalty,
    expit,
    loglik,
    newton_raphson,
    penalized_objective,
    replicate_data,
    score_and_hessian,
)
from pspline_marginal.models.marginal import (
    KernelSmoother,
    MarginalCurve,
    build_kernel,
    equidistant_test_points,
    estimate_marginal_logistic,
    marginal_projection,
    smooth_marginal,
    true_marginal_oracle,
)
from pspline_marginal.models.problem import PenalizedProblem
from pspline_marginal.models.vertical import VerticalMarginal, fit_vertical_marginal

__all__ = [
    "KernelSmoother",
    "LinearFit",
    "LogisticFit",
    "MarginalCurve",
    "MarginalPenalty",
    "ModelId",
    "NewtonConfig",
    "PenalizedProblem",
    "RoughnessPenalty",
    "VerticalMarginal",
    "build_kernel",
    "equidistant_test_points",
    "estimate_marginal_logistic",
    "expit",
    "fit0",
    "fit1",
    "fit2",
    "fit_vertical_marginal",
    "loglik",
    "marginal_projection",
    "newton_raphson",
    "penalized_objective",
    "penalized_sum_of_squares",
    "replicate_data",
    "score_and_hessian",
    "smooth_marginal",
    "solve_symmetric",
    "true_marginal_oracle",
]
