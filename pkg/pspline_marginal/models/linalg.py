from typing import Sequence

import numpy as np
from scipy import linalg

from pspline_marginal.core.exceptions import ShapeError, SingularSystemError
from pspline_marginal.core.log import logger

MAX_CONDITION = 1e12


def _pinned_directions(matrix: np.ndarray, candidates: Sequence[np.ndarray]) -> list:
    scale = max(np.max(np.abs(matrix)), 1.0)
    pinned = []
    for direction in candidates:
        norm = np.linalg.norm(direction)
        if norm and np.max(np.abs(matrix @ direction)) <= 1e-9 * scale * norm:
            pinned.append(direction / norm)
    return pinned


def solve_symmetric(
    matrix: np.ndarray,
    rhs: np.ndarray,
    *,
    null_directions: Sequence[np.ndarray] = (),
    max_condition: float = MAX_CONDITION,
) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for a symmetric positive semi-definite ``matrix``.

    Directions in ``null_directions`` that ``matrix`` annihilates are pinned to
    zero in the solution: the right-hand side is orthogonal to them whenever the
    system comes from normal equations, so adding ``s * v v^T`` leaves the
    solution set unchanged apart from selecting the member with ``v^T x = 0``.
    """
    A = np.array(matrix, dtype=float, copy=True)
    b = np.asarray(rhs, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"system matrix must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ShapeError(f"right-hand side has {b.shape[0]} rows, system has {A.shape[0]}")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        raise SingularSystemError("system contains non-finite entries", condition=float("inf"))

    pinned = _pinned_directions(A, null_directions)
    if pinned:
        shift = np.mean(np.abs(np.diag(A))) or 1.0
        for direction in pinned:
            A += shift * np.outer(direction, direction)

    condition = float(np.linalg.cond(A))
    if not np.isfinite(condition) or condition > max_condition:
        raise SingularSystemError(
            f"system of size {A.shape[0]} is singular or ill-conditioned "
            f"(condition estimate {condition:.3e} > {max_condition:.0e})",
            condition=condition,
        )

    try:
        factor = linalg.cho_factor(A)
        return linalg.cho_solve(factor, b)
    except linalg.LinAlgError:
        logger.debug("Cholesky factorization failed (condition {:.3e}), using symmetric solve", condition)
    try:
        return linalg.solve(A, b, assume_a="sym")
    except linalg.LinAlgError:
        logger.debug("Symmetric solve failed, using least squares")
    solution, *_ = linalg.lstsq(A, b)
    return solution
