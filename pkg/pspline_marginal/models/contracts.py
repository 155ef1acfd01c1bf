from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pspline_marginal.models.marginal import MarginalCurve


class ModelId(str, Enum):
    FIT0 = "Fit0"
    FIT1 = "Fit1"
    FIT2 = "Fit2"


class NewtonConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    beta0: Optional[List[float]] = None
    tol: float = Field(default=1e-8, gt=0)
    max_iter: int = Field(default=100, ge=1)
    step_halving_max: int = Field(default=20, ge=0)
    coefficient_guard: float = Field(default=1e3, gt=0)


@dataclass(frozen=True)
class LinearFit:
    model_id: ModelId
    beta: np.ndarray
    fitted: np.ndarray
    marginal: Optional[MarginalCurve]
    lambda1: float = 0.0
    lambda2: float = 0.0

    @property
    def response(self) -> np.ndarray:
        return self.fitted


@dataclass(frozen=True)
class LogisticFit:
    model_id: ModelId
    beta: np.ndarray
    theta_hat: np.ndarray
    marginal: Optional[MarginalCurve]
    lambda1: float
    lambda2: float
    converged: bool
    iterations: int
    final_step_norm: float
    objective: float
    separation_warning: bool = False
    objective_trace: Tuple[float, ...] = ()

    @property
    def response(self) -> np.ndarray:
        return self.theta_hat
