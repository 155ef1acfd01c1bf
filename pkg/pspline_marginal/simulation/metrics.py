import numpy as np

from pspline_marginal.core.exceptions import DomainError, ShapeError
from pspline_marginal.models.marginal import MarginalCurve


def _vector(value) -> np.ndarray:
    if isinstance(value, MarginalCurve):
        return np.asarray(value.theta, dtype=float)
    if hasattr(value, "response"):
        return np.asarray(value.response, dtype=float)
    return np.asarray(value, dtype=float).ravel()


def _marginal_vector(value) -> np.ndarray:
    marginal = getattr(value, "marginal", None)
    if marginal is not None:
        return np.asarray(marginal.theta, dtype=float)
    return _vector(value)


def _paired(estimate: np.ndarray, truth: np.ndarray):
    if estimate.shape != truth.shape:
        raise ShapeError(f"cannot compare {estimate.shape[0]} estimates with {truth.shape[0]} true values")
    return estimate, truth


def sum_of_squares(estimate, truth) -> float:
    estimate, truth = _paired(_vector(estimate), _vector(truth))
    return float(np.sum((estimate - truth) ** 2))


def weighted_sum_of_squares(estimate, truth) -> float:
    estimate, truth = _paired(_vector(estimate), _vector(truth))
    if np.any(truth <= 0.0) or np.any(truth >= 1.0):
        raise DomainError("weighted sum of squares needs true probabilities strictly inside (0, 1)")
    return float(np.sum((estimate - truth) ** 2 / (truth * (1.0 - truth))))


def ss_fitted(fit, truth) -> float:
    return sum_of_squares(fit, truth)


def ss_marginal(fit, truth) -> float:
    return sum_of_squares(_marginal_vector(fit), truth)


def wss_fitted(theta_hat, theta_true) -> float:
    return weighted_sum_of_squares(theta_hat, theta_true)


def wss_marginal(fit, truth) -> float:
    return weighted_sum_of_squares(_marginal_vector(fit), truth)
