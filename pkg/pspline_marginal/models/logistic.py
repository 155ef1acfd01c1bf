"""Newton-Raphson maximum likelihood for the binary-response models.

The objective maximised is

    l(beta) - lambda1 * beta^T Omega beta - lambda2 * |K theta(beta) - theta0|^2

where ``theta = expit(D beta)``. Derivatives are assembled term by term; the
marginal-penalty Hessian is the exact three-term expression, which can be
indefinite away from the optimum.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from pspline_marginal.core.exceptions import (
    ConfigurationError,
    NumericalError,
    ShapeError,
    SingularSystemError,
)
from pspline_marginal.core.log import logger
from pspline_marginal.models.contracts import LogisticFit, ModelId, NewtonConfig
from pspline_marginal.models.linalg import solve_symmetric
from pspline_marginal.models.marginal import KernelSmoother, MarginalCurve, smooth_marginal
from pspline_marginal.spline.design import (
    DesignLike,
    DesignMatrix,
    PenaltyPair,
    design_values,
    structural_null_directions,
)

PROBABILITY_CLAMP = 1e-12
# |eta| 超过该值时 expit 已与 0/1 相差不到 1e-13
LINEAR_PREDICTOR_GUARD = 30.0


@dataclass(frozen=True)
class RoughnessPenalty:
    penalty: PenaltyPair
    lambda1: float

    def __post_init__(self) -> None:
        if not self.lambda1 >= 0:
            raise ConfigurationError(f"lambda1 must be non-negative, got {self.lambda1}")


@dataclass(frozen=True)
class MarginalPenalty:
    kernel: KernelSmoother
    target: np.ndarray
    lambda2: float

    def __post_init__(self) -> None:
        if not self.lambda2 >= 0:
            raise ConfigurationError(f"lambda2 must be non-negative, got {self.lambda2}")
        target = self.target.theta if isinstance(self.target, MarginalCurve) else self.target
        object.__setattr__(self, "target", np.asarray(target, dtype=float).ravel())
        if np.shape(self.target)[0] != self.kernel.K.shape[0]:
            raise ShapeError(
                f"marginal target has {np.shape(self.target)[0]} values, kernel has {self.kernel.K.shape[0]} rows"
            )


def expit(a):
    return special.expit(a)


def _probabilities(eta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # theta 与 1 - theta 分开计算，避免大 |eta| 时的相消
    return special.expit(eta), special.expit(-eta)


def _check_response(X: np.ndarray, y: np.ndarray) -> None:
    if y.shape[0] != X.shape[0]:
        raise ShapeError(f"response has {y.shape[0]} rows, design has {X.shape[0]}")


def loglik(beta, D: DesignLike, y) -> float:
    X = design_values(D)
    y = np.asarray(y, dtype=float).ravel()
    _check_response(X, y)
    theta, complement = _probabilities(X @ np.asarray(beta, dtype=float))
    theta = np.clip(theta, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    complement = np.clip(complement, PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    return float(np.sum(y * np.log(theta) + (1.0 - y) * np.log(complement)))


def penalized_objective(
    beta,
    D: DesignLike,
    y,
    *,
    roughness: Optional[RoughnessPenalty] = None,
    marginal: Optional[MarginalPenalty] = None,
) -> float:
    beta = np.asarray(beta, dtype=float)
    value = loglik(beta, D, y)
    if roughness is not None and roughness.lambda1:
        value -= roughness.lambda1 * float(beta @ roughness.penalty.omega @ beta)
    if marginal is not None and marginal.lambda2:
        theta = expit(design_values(D) @ beta)
        gap = marginal.kernel.K @ theta - marginal.target
        value -= marginal.lambda2 * float(gap @ gap)
    return value


def score_and_hessian(
    beta,
    D: DesignLike,
    y,
    *,
    roughness: Optional[RoughnessPenalty] = None,
    marginal: Optional[MarginalPenalty] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    X = design_values(D)
    y = np.asarray(y, dtype=float).ravel()
    beta = np.asarray(beta, dtype=float)
    _check_response(X, y)
    if beta.shape[0] != X.shape[1]:
        raise ShapeError(f"beta has {beta.shape[0]} entries, design has {X.shape[1]} columns")

    theta, complement = _probabilities(X @ beta)
    spread = theta * complement
    gradient = X.T @ (y - theta)
    hessian = -(X * spread[:, None]).T @ X

    if roughness is not None and roughness.lambda1:
        omega = roughness.penalty.omega
        if omega.shape != hessian.shape:
            raise ShapeError(f"penalty of shape {omega.shape} does not match {X.shape[1]} coefficients")
        gradient -= 2.0 * roughness.lambda1 * (omega @ beta)
        hessian -= 2.0 * roughness.lambda1 * omega

    if marginal is not None and marginal.lambda2:
        K = marginal.kernel.K
        if K.shape[1] != X.shape[0]:
            raise ShapeError(f"kernel has {K.shape[1]} columns, design has {X.shape[0]} rows")
        gap = K @ theta - marginal.target
        smoothed_jacobian = K @ (X * spread[:, None])
        gradient -= 2.0 * marginal.lambda2 * (smoothed_jacobian.T @ gap)
        curvature = (K.T @ gap) * (1.0 - 2.0 * theta) * spread
        hessian -= 2.0 * marginal.lambda2 * (
            smoothed_jacobian.T @ smoothed_jacobian + (X * curvature[:, None]).T @ X
        )
    return gradient, hessian


def expected_information(
    beta,
    D: DesignLike,
    *,
    roughness: Optional[RoughnessPenalty] = None,
    marginal: Optional[MarginalPenalty] = None,
) -> np.ndarray:
    """Positive semi-definite curvature that drops the second-derivative terms of theta."""
    X = design_values(D)
    theta, complement = _probabilities(X @ np.asarray(beta, dtype=float))
    spread = theta * complement
    information = (X * spread[:, None]).T @ X
    if roughness is not None and roughness.lambda1:
        information += 2.0 * roughness.lambda1 * roughness.penalty.omega
    if marginal is not None and marginal.lambda2:
        smoothed_jacobian = marginal.kernel.K @ (X * spread[:, None])
        information += 2.0 * marginal.lambda2 * (smoothed_jacobian.T @ smoothed_jacobian)
    return information


def replicate_data(D: DesignLike, y, nrep: int):
    if nrep < 1:
        raise ConfigurationError(f"nrep must be at least 1, got {nrep}")
    y = np.tile(np.asarray(y).ravel(), nrep)
    if isinstance(D, DesignMatrix):
        return DesignMatrix(values=np.tile(D.values, (nrep, 1)), layout=D.layout), y
    return np.tile(design_values(D), (nrep, 1)), y


def _model_id(roughness: Optional[RoughnessPenalty], marginal: Optional[MarginalPenalty]) -> ModelId:
    if marginal is not None:
        return ModelId.FIT2
    if roughness is not None:
        return ModelId.FIT1
    return ModelId.FIT0


def _ascent_direction(beta, D, y, roughness, marginal, null_directions, iteration):
    gradient, hessian = score_and_hessian(beta, D, y, roughness=roughness, marginal=marginal)
    direction = solve_symmetric(-hessian, gradient, null_directions=null_directions)
    if gradient @ direction < 0:
        logger.debug("Iteration {}: Hessian is not negative definite, using expected information", iteration)
        information = expected_information(beta, D, roughness=roughness, marginal=marginal)
        direction = solve_symmetric(information, gradient, null_directions=null_directions)
    return gradient, direction


def newton_raphson(
    D: DesignLike,
    y,
    config: Optional[NewtonConfig] = None,
    *,
    roughness: Optional[RoughnessPenalty] = None,
    marginal: Optional[MarginalPenalty] = None,
    kernel: Optional[KernelSmoother] = None,
    model_id: Optional[ModelId] = None,
) -> LogisticFit:
    config = config or NewtonConfig()
    X = design_values(D)
    y = np.asarray(y, dtype=float).ravel()
    _check_response(X, y)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ConfigurationError("logistic response must be coded 0/1")

    if config.beta0 is None:
        beta = np.zeros(X.shape[1])
    else:
        beta = np.asarray(config.beta0, dtype=float)
        if beta.shape[0] != X.shape[1]:
            raise ShapeError(f"beta0 has {beta.shape[0]} entries, design has {X.shape[1]} columns")

    null_directions = structural_null_directions(D)

    def objective(candidate: np.ndarray) -> float:
        return penalized_objective(candidate, D, y, roughness=roughness, marginal=marginal)

    current = objective(beta)
    if not np.isfinite(current):
        raise NumericalError("penalized log-likelihood is not finite at the starting point", iteration=0)

    trace = [current]
    converged = False
    separation = False
    step_norm = float("inf")
    iteration = 0
    for iteration in range(1, config.max_iter + 1):
        try:
            gradient, direction = _ascent_direction(
                beta, D, y, roughness, marginal, null_directions, iteration
            )
        except SingularSystemError as error:
            # 首步即奇异说明设计本身退化
            if iteration == 1:
                raise
            separation = True
            logger.warning(
                "Iteration {}: curvature became singular (condition {:.3g}), suspected separation",
                iteration,
                error.condition,
            )
            break

        step = 1.0
        accepted = None
        for _ in range(config.step_halving_max + 1):
            candidate = beta + step * direction
            value = objective(candidate)
            if np.isfinite(value) and value >= current - 1e-12 * (1.0 + abs(current)):
                accepted = (candidate, value)
                break
            step *= 0.5
        if accepted is None:
            if not np.isfinite(value):
                raise NumericalError(
                    f"penalized log-likelihood became non-finite at iteration {iteration}",
                    iteration=iteration,
                )
            logger.warning("Iteration {}: step halving found no ascent step, stopping", iteration)
            break

        candidate, value = accepted
        step_norm = float(np.max(np.abs(candidate - beta)))
        beta, current = candidate, value
        trace.append(current)
        logger.debug("Iteration {}: objective {:.10g}, step {:.3e}", iteration, current, step_norm)

        if np.max(np.abs(beta)) > config.coefficient_guard or np.max(np.abs(X @ beta)) > LINEAR_PREDICTOR_GUARD:
            separation = True
            logger.warning(
                "Iteration {}: coefficients diverging (max |beta| = {:.3g}), suspected separation",
                iteration,
                float(np.max(np.abs(beta))),
            )
            break
        if step_norm < config.tol:
            converged = True
            break

    if not converged and not separation:
        logger.warning(
            "Newton-Raphson stopped after {} iterations without converging (last step {:.3e})",
            iteration,
            step_norm,
        )

    theta_hat = np.clip(expit(X @ beta), PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    if marginal is not None:
        kernel = marginal.kernel
    curve = smooth_marginal(kernel, theta_hat) if kernel is not None else None
    return LogisticFit(
        model_id=model_id or _model_id(roughness, marginal),
        beta=beta,
        theta_hat=theta_hat,
        marginal=curve,
        lambda1=roughness.lambda1 if roughness is not None else 0.0,
        lambda2=marginal.lambda2 if marginal is not None else 0.0,
        converged=converged,
        iterations=iteration,
        final_step_norm=step_norm,
        objective=current,
        separation_warning=separation,
        objective_trace=tuple(trace),
    )
