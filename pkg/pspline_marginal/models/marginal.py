"""Kernel smoothing of fitted surfaces onto a set of test points."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special, stats

from pspline_marginal.core.exceptions import ConfigurationError, DomainError, ShapeError
from pspline_marginal.spline.design import DesignLike, design_values

DEFAULT_SIGMA_K = 0.1
DEFAULT_NUM_TEST_POINTS = 100
DEFAULT_NUM_Z_POINTS = 10_000


@dataclass(frozen=True)
class KernelSmoother:
    x_test: np.ndarray
    sigma_k: float
    K: np.ndarray

    @property
    def num_test(self) -> int:
        return self.K.shape[0]

    def tile(self, nrep: int) -> "KernelSmoother":
        """Kernel over ``nrep`` block copies of the same sample; smoothed values are unchanged."""
        if nrep == 1:
            return self
        return KernelSmoother(x_test=self.x_test, sigma_k=self.sigma_k, K=np.tile(self.K, (1, nrep)) / nrep)


@dataclass(frozen=True)
class MarginalCurve:
    x_test: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        if np.shape(self.x_test) != np.shape(self.theta):
            raise ShapeError(
                f"marginal curve has {np.size(self.x_test)} test points but {np.size(self.theta)} values"
            )


def equidistant_test_points(n_test: int = DEFAULT_NUM_TEST_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, n_test)


def build_kernel(x_H, x_test, sigma_k: float = DEFAULT_SIGMA_K) -> KernelSmoother:
    if not sigma_k > 0:
        raise ConfigurationError(f"kernel bandwidth sigma_k must be positive, got {sigma_k}")
    x_H = np.asarray(x_H, dtype=float).ravel()
    x_test = np.asarray(x_test, dtype=float).ravel()
    if x_H.size == 0:
        raise ConfigurationError("kernel needs at least one sample point")
    log_weights = stats.norm.logpdf((x_H[None, :] - x_test[:, None]) / sigma_k)
    K = special.softmax(log_weights, axis=1)
    return KernelSmoother(x_test=x_test, sigma_k=float(sigma_k), K=K)


def _kernel_matrix(K) -> np.ndarray:
    if isinstance(K, KernelSmoother):
        return K.K
    return np.asarray(K, dtype=float)


def marginal_projection(K, D: DesignLike) -> np.ndarray:
    weights = _kernel_matrix(K)
    values = design_values(D)
    if weights.shape[1] != values.shape[0]:
        raise ShapeError(
            f"kernel has {weights.shape[1]} columns but design has {values.shape[0]} rows"
        )
    return weights @ values


def smooth_marginal(K: KernelSmoother, values) -> MarginalCurve:
    values = np.asarray(values, dtype=float)
    if K.K.shape[1] != values.shape[0]:
        raise ShapeError(f"kernel has {K.K.shape[1]} columns but {values.shape[0]} fitted values")
    return MarginalCurve(x_test=K.x_test, theta=K.K @ values)


def estimate_marginal_logistic(K: KernelSmoother, theta_hat) -> MarginalCurve:
    theta_hat = np.asarray(theta_hat, dtype=float)
    if np.any(theta_hat <= 0.0) or np.any(theta_hat >= 1.0):
        raise DomainError("fitted probabilities must lie strictly inside (0, 1)")
    return smooth_marginal(K, theta_hat)


def true_marginal_oracle(
    surface: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_test,
    m_z: int = DEFAULT_NUM_Z_POINTS,
    *,
    z_grid: Optional[np.ndarray] = None,
) -> MarginalCurve:
    """Average ``surface(x, z)`` over a uniform z grid at every test point.

    The default grid is the ``m_z`` cell midpoints ``(i + 0.5) / m_z``.
    """
    if z_grid is None:
        if m_z < 1:
            raise ConfigurationError(f"oracle needs m_z >= 1, got {m_z}")
        z_grid = (np.arange(m_z) + 0.5) / m_z
    x_test = np.asarray(x_test, dtype=float).ravel()
    z_grid = np.asarray(z_grid, dtype=float).ravel()
    values = np.broadcast_to(
        surface(x_test[:, None], z_grid[None, :]), (x_test.size, z_grid.size)
    )
    return MarginalCurve(x_test=x_test, theta=values.mean(axis=1))
