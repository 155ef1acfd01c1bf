"""Collapse a block of covariates into one scalar on [0, 1]."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from sklearn.decomposition import PCA
from sklearn.preprocessing import StandardScaler

from pspline_marginal.core.exceptions import (
    ConfigurationError,
    DataSchemaError,
    DomainError,
    ReductionError,
    ShapeError,
)
from pspline_marginal.core.log import logger
from pspline_marginal.models.contracts import NewtonConfig
from pspline_marginal.models.logistic import newton_raphson


class ReductionMethod(str, Enum):
    LINEAR_PREDICTOR = "linear_predictor"
    PCA = "pca"


@dataclass(frozen=True)
class CovariateBlock:
    values: np.ndarray
    names: List[str]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", values)
        if values.shape[1] < 1:
            raise DataSchemaError("covariate block needs at least one column")
        if len(self.names) != values.shape[1]:
            raise DataSchemaError(f"{len(self.names)} names for {values.shape[1]} covariate columns")
        missing = ~np.isfinite(values)
        if missing.any():
            row, column = np.argwhere(missing)[0]
            raise DataSchemaError(
                f"covariate block has {int(missing.sum())} missing entries, first at row {row} column {self.names[column]!r}"
            )

    def select(self, names: List[str]) -> "CovariateBlock":
        index = [self.names.index(name) for name in names]
        return CovariateBlock(values=self.values[:, index], names=list(names))


@dataclass(frozen=True)
class ReducedVector:
    values: np.ndarray
    method: ReductionMethod
    names: List[str]
    lower: float
    upper: float
    # linear_predictor: 截距与系数；pca: 标准化参数与载荷
    coefficients: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None
    loading: Optional[np.ndarray] = None

    def raw_scores(self, block: CovariateBlock) -> np.ndarray:
        block = block.select(self.names)
        if self.method is ReductionMethod.LINEAR_PREDICTOR:
            return self.coefficients[0] + block.values @ self.coefficients[1:]
        return ((block.values - self.center) / self.scale) @ self.loading


def rescale_unit(values) -> Tuple[np.ndarray, float, float]:
    values = np.asarray(values, dtype=float)
    lower, upper = float(values.min()), float(values.max())
    if not upper > lower:
        raise DomainError("cannot rescale a constant vector to [0, 1]")
    scaled = (values - lower) / (upper - lower)
    # 端点精确落在 0 和 1
    scaled[values == lower] = 0.0
    scaled[values == upper] = 1.0
    return scaled, lower, upper


def glm_linear_predictor(
    block: CovariateBlock, y, *, newton: Optional[NewtonConfig] = None
) -> ReducedVector:
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != block.values.shape[0]:
        raise ShapeError(f"response has {y.shape[0]} rows, block has {block.values.shape[0]}")
    design = np.column_stack([np.ones(block.values.shape[0]), block.values])
    fit = newton_raphson(design, y, newton)
    if fit.separation_warning or not fit.converged:
        raise ReductionError(
            f"logistic fit of {len(block.names)} covariates did not converge "
            f"(separation suspected: {fit.separation_warning}); trim extreme rows or use PCA"
        )
    eta = design @ fit.beta
    values, lower, upper = rescale_unit(eta)
    return ReducedVector(
        values=values,
        method=ReductionMethod.LINEAR_PREDICTOR,
        names=list(block.names),
        lower=lower,
        upper=upper,
        coefficients=fit.beta,
    )


def pca_first_component(block: CovariateBlock) -> ReducedVector:
    if block.values.shape[0] < 2:
        raise ConfigurationError("PCA needs at least two rows")
    spread = block.values.std(axis=0)
    kept = spread > 0
    if not kept.all():
        dropped = [name for name, keep in zip(block.names, kept) if not keep]
        logger.warning("Dropping zero-variance covariates before PCA: {}", dropped)
    if not kept.any():
        raise ReductionError("every covariate in the block has zero variance")
    names = [name for name, keep in zip(block.names, kept) if keep]
    values = block.values[:, kept]

    scaler = StandardScaler().fit(values)
    standardized = scaler.transform(values)
    loading = PCA(n_components=1).fit(standardized).components_[0]
    if loading[np.argmax(np.abs(loading))] < 0:
        loading = -loading
    scores, lower, upper = rescale_unit(standardized @ loading)
    return ReducedVector(
        values=scores,
        method=ReductionMethod.PCA,
        names=names,
        lower=lower,
        upper=upper,
        center=scaler.mean_,
        scale=scaler.scale_,
        loading=loading,
    )


def reduce_block(
    block: CovariateBlock,
    method: ReductionMethod,
    y=None,
    *,
    newton: Optional[NewtonConfig] = None,
) -> ReducedVector:
    method = ReductionMethod(method)
    if method is ReductionMethod.LINEAR_PREDICTOR:
        if y is None:
            raise ConfigurationError("linear predictor reduction needs the binary response")
        return glm_linear_predictor(block, y, newton=newton)
    return pca_first_component(block)


def project_reduction(reduced: ReducedVector, block: CovariateBlock) -> np.ndarray:
    scaled = (reduced.raw_scores(block) - reduced.lower) / (reduced.upper - reduced.lower)
    outside = int(np.sum((scaled < 0.0) | (scaled > 1.0)))
    if outside:
        logger.warning("Clipped {} projected row(s) to the fitted [0, 1] range", outside)
    return np.clip(scaled, 0.0, 1.0)


@dataclass(frozen=True)
class TrimResult:
    x: np.ndarray
    z: Optional[np.ndarray]
    y: np.ndarray
    kept: np.ndarray
    removed: int
    # 截尾后 x 的取值区间（截尾前的尺度），用于映射其他数据集
    x_range: Tuple[float, float]
    z_range: Optional[Tuple[float, float]]

    def map_x(self, values) -> np.ndarray:
        lower, upper = self.x_range
        return np.clip((np.asarray(values, dtype=float) - lower) / (upper - lower), 0.0, 1.0)


def _quantile_mask(values: np.ndarray, lower_q: float, upper_q: float) -> np.ndarray:
    lower, upper = np.quantile(values, [lower_q, upper_q])
    return (values >= lower) & (values <= upper)


def trim_extremes(x, z, y, lower_q: float, upper_q: float) -> TrimResult:
    if not 0.0 <= lower_q < upper_q <= 1.0:
        raise ConfigurationError(f"trimming quantiles must satisfy 0 <= lower < upper <= 1, got ({lower_q}, {upper_q})")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y).ravel()
    kept = _quantile_mask(x, lower_q, upper_q)
    if z is not None:
        z = np.asarray(z, dtype=float).ravel()
        kept &= _quantile_mask(z, lower_q, upper_q)
    if not kept.any():
        raise ConfigurationError(f"trimming at ({lower_q}, {upper_q}) removes every row")

    x_kept, x_lower, x_upper = rescale_unit(x[kept])
    z_kept, z_range = None, None
    if z is not None:
        z_kept, z_lower, z_upper = rescale_unit(z[kept])
        z_range = (z_lower, z_upper)
    removed = int(x.size - kept.sum())
    logger.info("Trimming at quantiles ({}, {}) removed {} row(s)", lower_q, upper_q, removed)
    return TrimResult(
        x=x_kept,
        z=z_kept,
        y=y[kept],
        kept=kept,
        removed=removed,
        x_range=(x_lower, x_upper),
        z_range=z_range,
    )
