from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from pspline_marginal.core.log import logger
from pspline_marginal.models import linear
from pspline_marginal.models.contracts import LinearFit, LogisticFit, NewtonConfig
from pspline_marginal.models.logistic import RoughnessPenalty, expit, newton_raphson
from pspline_marginal.spline.basis import BasisSpec, eval_basis
from pspline_marginal.spline.design import build_roughness, build_univariate_design


@dataclass(frozen=True)
class VerticalMarginal:
    """Once-penalized spline in x alone, fitted on the vertical data."""

    spec: BasisSpec
    beta: np.ndarray
    binary: bool
    fit: Union[LinearFit, LogisticFit]

    def evaluate(self, xs) -> np.ndarray:
        design = build_univariate_design(eval_basis(self.spec, xs))
        eta = design.values @ self.beta
        return expit(eta) if self.binary else eta


def fit_vertical_marginal(
    x_V,
    y_V,
    spec_x: BasisSpec,
    lambda1: float,
    *,
    binary: bool,
    newton: Optional[NewtonConfig] = None,
) -> VerticalMarginal:
    design = build_univariate_design(eval_basis(spec_x, x_V), strict=True)
    penalty = build_roughness(design.layout)
    if binary:
        fit = newton_raphson(design, y_V, newton, roughness=RoughnessPenalty(penalty, lambda1))
        if not fit.converged:
            logger.warning("Vertical marginal fit did not converge after {} iterations", fit.iterations)
    else:
        fit = linear.fit1(design, y_V, penalty, lambda1)
    logger.info(
        "Fitted vertical marginal on {} rows with px={} and lambda1={}",
        design.num_rows,
        spec_x.num_basis,
        lambda1,
    )
    return VerticalMarginal(spec=spec_x, beta=fit.beta, binary=binary, fit=fit)
