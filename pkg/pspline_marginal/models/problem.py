from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Union

import numpy as np

from pspline_marginal.models import linear
from pspline_marginal.models.contracts import LinearFit, LogisticFit, ModelId, NewtonConfig
from pspline_marginal.models.logistic import (
    MarginalPenalty,
    RoughnessPenalty,
    expit,
    newton_raphson,
    replicate_data,
)
from pspline_marginal.models.marginal import (
    KernelSmoother,
    MarginalCurve,
    marginal_projection,
    smooth_marginal,
)
from pspline_marginal.spline.design import DesignMatrix, PenaltyPair

Fit = Union[LinearFit, LogisticFit]


@dataclass(frozen=True)
class PenalizedProblem:
    """One horizontal dataset prepared for Fit0, Fit1 and Fit2.

    Binary problems are fitted on ``nrep`` block copies of the rows; the
    returned probabilities and marginals always refer to the original rows.
    """

    design: DesignMatrix
    y: np.ndarray
    penalty: PenaltyPair
    kernel: KernelSmoother
    target: MarginalCurve
    binary: bool = False
    nrep: int = 1
    newton: NewtonConfig = field(default_factory=NewtonConfig)

    @cached_property
    def W(self) -> np.ndarray:
        return marginal_projection(self.kernel, self.design)

    @cached_property
    def _replicated(self):
        design, y = replicate_data(self.design, self.y, self.nrep)
        return design, y, self.kernel.tile(self.nrep)

    def fit(self, model_id: ModelId, lambda1: float = 0.0, lambda2: float = 0.0) -> Fit:
        if model_id is ModelId.FIT0:
            return self.fit0()
        if model_id is ModelId.FIT1:
            return self.fit1(lambda1)
        return self.fit2(lambda1, lambda2)

    def fit0(self) -> Fit:
        if not self.binary:
            return linear.fit0(self.design, self.y, kernel=self.kernel)
        return self._fit_logistic(ModelId.FIT0, None, None)

    def fit1(self, lambda1: float) -> Fit:
        if not self.binary:
            return linear.fit1(self.design, self.y, self.penalty, lambda1, kernel=self.kernel)
        return self._fit_logistic(ModelId.FIT1, lambda1, None)

    def fit2(self, lambda1: float, lambda2: float) -> Fit:
        if not self.binary:
            return linear.fit2(self.design, self.y, self.penalty, self.W, self.target, lambda1, lambda2)
        return self._fit_logistic(ModelId.FIT2, lambda1, lambda2)

    def _fit_logistic(self, model_id: ModelId, lambda1, lambda2) -> LogisticFit:
        design, y, kernel = self._replicated
        roughness = RoughnessPenalty(self.penalty, lambda1) if lambda1 is not None else None
        marginal = MarginalPenalty(kernel, self.target, lambda2) if lambda2 is not None else None
        fit = newton_raphson(
            design,
            y,
            self.newton,
            roughness=roughness,
            marginal=marginal,
            kernel=kernel,
            model_id=model_id,
        )
        if self.nrep == 1:
            return fit
        theta_hat = np.clip(expit(self.design.values @ fit.beta), 1e-12, 1.0 - 1e-12)
        return replace(fit, theta_hat=theta_hat, marginal=smooth_marginal(self.kernel, theta_hat))
