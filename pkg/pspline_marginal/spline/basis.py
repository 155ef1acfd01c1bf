"""Univariate B-spline bases on clamped, equidistant knots.

Evaluation follows the Cox-de Boor recursion restricted to the ``degree + 1``
functions that are non-zero on each knot span, so a row of the basis matrix
always sums to one for inputs inside the domain.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from pspline_marginal.core.exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class BasisSpec:
    num_basis: int
    degree: int = 3
    domain_lo: float = 0.0
    domain_hi: float = 1.0

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ConfigurationError(f"degree must be non-negative, got {self.degree}")
        if self.num_basis < self.degree + 1:
            raise ConfigurationError(
                f"num_basis={self.num_basis} must be at least degree + 1 = {self.degree + 1}"
            )
        if not self.domain_lo < self.domain_hi:
            raise ConfigurationError(
                f"empty domain [{self.domain_lo}, {self.domain_hi}]"
            )


@dataclass(frozen=True)
class KnotVector:
    knots: np.ndarray
    spec: BasisSpec

    @property
    def num_spans(self) -> int:
        return self.spec.num_basis - self.spec.degree


@dataclass(frozen=True)
class BasisMatrix:
    values: np.ndarray
    spec: BasisSpec

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    @property
    def num_basis(self) -> int:
        return self.values.shape[1]

    def drop_first(self) -> "BasisMatrix":
        return BasisMatrix(values=self.values[:, 1:], spec=self.spec)


def make_knot_vector(spec: BasisSpec) -> KnotVector:
    breakpoints = np.linspace(spec.domain_lo, spec.domain_hi, spec.num_basis - spec.degree + 1)
    knots = np.concatenate(
        [
            np.full(spec.degree, spec.domain_lo),
            breakpoints,
            np.full(spec.degree, spec.domain_hi),
        ]
    )
    return KnotVector(knots=knots, spec=spec)


def _find_span(knots: np.ndarray, xs: np.ndarray, spec: BasisSpec) -> np.ndarray:
    # 右端点归入最后一个区间
    span = np.searchsorted(knots, xs, side="right") - 1
    return np.clip(span, spec.degree, spec.num_basis - 1)


def eval_basis(spec: BasisSpec, xs) -> BasisMatrix:
    x = np.asarray(xs, dtype=float).ravel()
    if x.size and (
        not np.all(np.isfinite(x)) or x.min() < spec.domain_lo or x.max() > spec.domain_hi
    ):
        outside = x[~((x >= spec.domain_lo) & (x <= spec.domain_hi))]
        raise DomainError(
            f"{outside.size} value(s) outside basis domain [{spec.domain_lo}, {spec.domain_hi}], "
            f"first offender {outside[0]!r}"
        )

    knots = make_knot_vector(spec).knots
    degree = spec.degree
    span = _find_span(knots, x, spec)

    local = np.zeros((x.size, degree + 1))
    local[:, 0] = 1.0
    left = np.zeros((x.size, degree + 1))
    right = np.zeros((x.size, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = x - knots[span + 1 - j]
        right[:, j] = knots[span + j] - x
        saved = np.zeros(x.size)
        for r in range(j):
            temp = local[:, r] / (right[:, r + 1] + left[:, j - r])
            local[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        local[:, j] = saved

    values = np.zeros((x.size, spec.num_basis))
    columns = span[:, None] - degree + np.arange(degree + 1)
    values[np.arange(x.size)[:, None], columns] = local
    return BasisMatrix(values=values, spec=spec)


class BasisConvention(str, Enum):
    # p 个完整的夹紧基函数
    CLAMPED = "clamped"
    # p + 1 个基函数去掉第一个，共 p 列（R 中 bs(x, df = p) 的默认列）
    DROP_FIRST = "drop_first"


def covariate_basis(
    xs,
    p: int,
    *,
    degree: int = 3,
    convention: BasisConvention = BasisConvention.CLAMPED,
    domain_lo: float = 0.0,
    domain_hi: float = 1.0,
) -> BasisMatrix:
    """Basis with exactly ``p`` columns for one covariate.

    Under ``DROP_FIRST`` the rows no longer sum to one, so the intercept of the
    design is not duplicated and no structural null direction remains.
    """
    if convention is BasisConvention.DROP_FIRST:
        spec = BasisSpec(num_basis=p + 1, degree=degree, domain_lo=domain_lo, domain_hi=domain_hi)
        return eval_basis(spec, xs).drop_first()
    spec = BasisSpec(num_basis=p, degree=degree, domain_lo=domain_lo, domain_hi=domain_hi)
    return eval_basis(spec, xs)


def second_difference_matrix(p: int) -> np.ndarray:
    if p < 3:
        raise ConfigurationError(f"second differences need at least 3 coefficients, got {p}")
    return np.diff(np.eye(p), n=2, axis=0)
