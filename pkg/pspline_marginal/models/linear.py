"""Closed-form estimators for a continuous response.

All three fits solve the same normal system

    (D^T D + lambda1 * Omega + lambda2 * W^T W) beta = D^T y + lambda2 * W^T theta

with the unused penalty weights set to zero.
"""

from typing import Optional, Union

import numpy as np

from pspline_marginal.core.exceptions import ConfigurationError, ShapeError
from pspline_marginal.models.contracts import LinearFit, ModelId
from pspline_marginal.models.linalg import solve_symmetric
from pspline_marginal.models.marginal import KernelSmoother, MarginalCurve, smooth_marginal
from pspline_marginal.spline.design import (
    DesignLike,
    PenaltyPair,
    design_values,
    structural_null_directions,
)

TargetLike = Union[MarginalCurve, np.ndarray]


def _check_lambda(name: str, value: float) -> float:
    if not value >= 0:
        raise ConfigurationError(f"{name} must be non-negative, got {value}")
    return float(value)


def _target_values(theta_target: TargetLike) -> np.ndarray:
    if isinstance(theta_target, MarginalCurve):
        return np.asarray(theta_target.theta, dtype=float)
    return np.asarray(theta_target, dtype=float).ravel()


def _solve(
    model_id: ModelId,
    D: DesignLike,
    y,
    *,
    penalty: Optional[PenaltyPair],
    lambda1: float,
    W: Optional[np.ndarray],
    theta_target: Optional[TargetLike],
    lambda2: float,
    kernel: Optional[KernelSmoother],
) -> LinearFit:
    X = design_values(D)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise ShapeError(f"response has {y.shape[0]} rows, design has {X.shape[0]}")

    system = X.T @ X
    rhs = X.T @ y
    if penalty is not None and lambda1 > 0:
        omega = penalty.omega
        if omega.shape != system.shape:
            raise ShapeError(f"penalty of shape {omega.shape} does not match {X.shape[1]} coefficients")
        system = system + lambda1 * omega

    marginal = None
    if W is not None:
        W = np.asarray(W, dtype=float)
        target = _target_values(theta_target)
        if W.shape[1] != X.shape[1]:
            raise ShapeError(f"W has {W.shape[1]} columns, design has {X.shape[1]}")
        if W.shape[0] != target.shape[0]:
            raise ShapeError(f"W has {W.shape[0]} rows but the target has {target.shape[0]} values")
        if lambda2 > 0:
            system = system + lambda2 * (W.T @ W)
            rhs = rhs + lambda2 * (W.T @ target)

    beta = solve_symmetric(system, rhs, null_directions=structural_null_directions(D))
    fitted = X @ beta
    if W is not None:
        x_test = (
            theta_target.x_test
            if isinstance(theta_target, MarginalCurve)
            else np.arange(W.shape[0], dtype=float)
        )
        marginal = MarginalCurve(x_test=x_test, theta=W @ beta)
    elif kernel is not None:
        marginal = smooth_marginal(kernel, fitted)
    return LinearFit(
        model_id=model_id,
        beta=beta,
        fitted=fitted,
        marginal=marginal,
        lambda1=lambda1,
        lambda2=lambda2,
    )


def fit0(D: DesignLike, y, *, kernel: Optional[KernelSmoother] = None) -> LinearFit:
    return _solve(
        ModelId.FIT0, D, y,
        penalty=None, lambda1=0.0, W=None, theta_target=None, lambda2=0.0, kernel=kernel,
    )


def fit1(
    D: DesignLike,
    y,
    P: PenaltyPair,
    lambda1: float,
    *,
    kernel: Optional[KernelSmoother] = None,
) -> LinearFit:
    lambda1 = _check_lambda("lambda1", lambda1)
    return _solve(
        ModelId.FIT1, D, y,
        penalty=P, lambda1=lambda1, W=None, theta_target=None, lambda2=0.0, kernel=kernel,
    )


def fit2(
    D: DesignLike,
    y,
    P: PenaltyPair,
    W: np.ndarray,
    theta_target: TargetLike,
    lambda1: float,
    lambda2: float,
) -> LinearFit:
    lambda1 = _check_lambda("lambda1", lambda1)
    lambda2 = _check_lambda("lambda2", lambda2)
    return _solve(
        ModelId.FIT2, D, y,
        penalty=P, lambda1=lambda1, W=W, theta_target=theta_target, lambda2=lambda2, kernel=None,
    )


def penalized_sum_of_squares(
    beta,
    D: DesignLike,
    y,
    *,
    P: Optional[PenaltyPair] = None,
    lambda1: float = 0.0,
    W: Optional[np.ndarray] = None,
    theta_target: Optional[TargetLike] = None,
    lambda2: float = 0.0,
) -> float:
    X = design_values(D)
    beta = np.asarray(beta, dtype=float)
    residual = np.asarray(y, dtype=float).ravel() - X @ beta
    value = float(residual @ residual)
    if P is not None and lambda1:
        value += lambda1 * float(beta @ P.omega @ beta)
    if W is not None and lambda2:
        gap = np.asarray(W) @ beta - _target_values(theta_target)
        value += lambda2 * float(gap @ gap)
    return value
