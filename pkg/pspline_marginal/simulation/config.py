import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from pspline_marginal.models.contracts import NewtonConfig
from pspline_marginal.models.marginal import (
    DEFAULT_NUM_TEST_POINTS,
    DEFAULT_NUM_Z_POINTS,
    DEFAULT_SIGMA_K,
)
from pspline_marginal.spline.basis import BasisConvention


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_h: int = Field(default=400, ge=4)
    sigma_noise: float = Field(default=0.2, ge=0)
    interaction: bool = True
    px: int = Field(default=18, ge=3)
    pz: int = Field(default=18, ge=3)
    degree: int = Field(default=3, ge=1)
    basis: BasisConvention = BasisConvention.DROP_FIRST
    nrep: int = Field(default=1, ge=1)
    nsim: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    binary: bool = False
    # None 表示按曲面在网格上的取值范围映射到 [-2.5, 2.5]
    logit_scale: Optional[Tuple[float, float]] = None
    sigma_k: float = Field(default=DEFAULT_SIGMA_K, gt=0)
    n_test: int = Field(default=DEFAULT_NUM_TEST_POINTS, ge=2)
    m_z: int = Field(default=DEFAULT_NUM_Z_POINTS, ge=1)

    @model_validator(mode="after")
    def _check_grid(self) -> "SimConfig":
        side = math.isqrt(self.n_h)
        if side * side != self.n_h:
            raise ValueError(f"n_h={self.n_h} must be a perfect square for the regular grid")
        if self.px < self.degree + 1 or self.pz < self.degree + 1:
            raise ValueError(f"px={self.px}, pz={self.pz} must be at least degree + 1 = {self.degree + 1}")
        columns = 1 + self.px * self.pz if self.interaction else 1 + self.px + self.pz
        if not columns < self.n_h:
            layout = "interaction" if self.interaction else "additive"
            raise ValueError(f"{layout} design needs {columns} < n_h, got n_h={self.n_h}")
        return self

    @property
    def grid_side(self) -> int:
        return math.isqrt(self.n_h)


class FitRecipe(BaseModel):
    """Penalty weights for one batch: Fit1 uses lambda1a, Fit2 uses lambda1b and lambda2."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda1a: float = Field(default=0.5, ge=0)
    lambda1b: float = Field(default=0.5, ge=0)
    lambda2: float = Field(default=2.0, ge=0)
    newton: NewtonConfig = Field(default_factory=NewtonConfig)
