"""Design matrices and roughness penalties for the two-covariate layouts.

Interaction columns are ordered j-major: column ``1 + j * pz + k`` holds
``Bx[:, j] * Bz[:, k]``. Under that ordering the x-direction penalty is
``kron(D2_px, I_pz)`` and the z-direction penalty is ``kron(I_px, D2_pz)``.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Union

import numpy as np

from pspline_marginal.core.exceptions import ConfigurationError, ShapeError
from pspline_marginal.spline.basis import BasisMatrix, second_difference_matrix


class LayoutKind(str, Enum):
    ADDITIVE = "additive"
    INTERACTION = "interaction"
    # (1 | Bx)，用于纵向数据的单协变量边际拟合
    UNIVARIATE = "univariate"


@dataclass(frozen=True)
class Layout:
    kind: LayoutKind
    px: int
    pz: int = 0
    intercept_col: int = 0

    @property
    def num_columns(self) -> int:
        if self.kind is LayoutKind.INTERACTION:
            return 1 + self.px * self.pz
        if self.kind is LayoutKind.ADDITIVE:
            return 1 + self.px + self.pz
        return 1 + self.px

    def check_sample_size(self, n_rows: int) -> None:
        if not self.num_columns < n_rows:
            raise ConfigurationError(
                f"{self.kind.value} layout with px={self.px}, pz={self.pz} needs "
                f"{self.num_columns} < N, got N={n_rows}"
            )

    def null_directions(self) -> List[np.ndarray]:
        """Coefficient directions that leave ``D @ beta`` unchanged for full clamped bases."""
        if self.kind is LayoutKind.ADDITIVE:
            along_x = np.zeros(self.num_columns)
            along_x[0] = 1.0
            along_x[1 : 1 + self.px] = -1.0
            along_z = np.zeros(self.num_columns)
            along_z[0] = 1.0
            along_z[1 + self.px :] = -1.0
            return [along_x, along_z]
        direction = -np.ones(self.num_columns)
        direction[0] = 1.0
        return [direction]


@dataclass(frozen=True)
class DesignMatrix:
    values: np.ndarray
    layout: Layout

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    @property
    def num_columns(self) -> int:
        return self.values.shape[1]

    def take(self, rows) -> "DesignMatrix":
        return DesignMatrix(values=self.values[rows], layout=self.layout)


@dataclass(frozen=True)
class PenaltyPair:
    P1: np.ndarray
    P2: np.ndarray

    @property
    def omega(self) -> np.ndarray:
        return self.P1.T @ self.P1 + self.P2.T @ self.P2


DesignLike = Union[DesignMatrix, np.ndarray]


def design_values(design: DesignLike) -> np.ndarray:
    if isinstance(design, DesignMatrix):
        return design.values
    values = np.asarray(design, dtype=float)
    if values.ndim != 2:
        raise ShapeError(f"design must be a 2-D matrix, got shape {values.shape}")
    return values


def structural_null_directions(design: DesignLike, *, atol: float = 1e-10) -> List[np.ndarray]:
    if not isinstance(design, DesignMatrix):
        return []
    kept = []
    for direction in design.layout.null_directions():
        if design.num_rows == 0 or np.max(np.abs(design.values @ direction)) <= atol:
            kept.append(direction)
    return kept


def _check_rows(Bx: BasisMatrix, Bz: BasisMatrix) -> None:
    if Bx.num_rows != Bz.num_rows:
        raise ShapeError(f"Bx has {Bx.num_rows} rows but Bz has {Bz.num_rows}")


def build_additive_design(Bx: BasisMatrix, Bz: BasisMatrix, *, strict: bool = False) -> DesignMatrix:
    _check_rows(Bx, Bz)
    layout = Layout(kind=LayoutKind.ADDITIVE, px=Bx.num_basis, pz=Bz.num_basis)
    if strict:
        layout.check_sample_size(Bx.num_rows)
    values = np.column_stack([np.ones(Bx.num_rows), Bx.values, Bz.values])
    return DesignMatrix(values=values, layout=layout)


def build_interaction_design(
    Bx: BasisMatrix, Bz: BasisMatrix, *, strict: bool = False
) -> DesignMatrix:
    _check_rows(Bx, Bz)
    layout = Layout(kind=LayoutKind.INTERACTION, px=Bx.num_basis, pz=Bz.num_basis)
    if strict:
        layout.check_sample_size(Bx.num_rows)
    products = (Bx.values[:, :, None] * Bz.values[:, None, :]).reshape(Bx.num_rows, -1)
    values = np.column_stack([np.ones(Bx.num_rows), products])
    return DesignMatrix(values=values, layout=layout)


def build_univariate_design(Bx: BasisMatrix, *, strict: bool = False) -> DesignMatrix:
    layout = Layout(kind=LayoutKind.UNIVARIATE, px=Bx.num_basis)
    if strict:
        layout.check_sample_size(Bx.num_rows)
    values = np.column_stack([np.ones(Bx.num_rows), Bx.values])
    return DesignMatrix(values=values, layout=layout)


def build_design(
    Bx: BasisMatrix, Bz: BasisMatrix, *, interaction: bool, strict: bool = False
) -> DesignMatrix:
    if interaction:
        return build_interaction_design(Bx, Bz, strict=strict)
    return build_additive_design(Bx, Bz, strict=strict)


def _pad_intercept(block: np.ndarray) -> np.ndarray:
    return np.column_stack([np.zeros(block.shape[0]), block])


def build_roughness(layout: Layout) -> PenaltyPair:
    if layout.kind is LayoutKind.UNIVARIATE:
        if layout.px < 3:
            raise ConfigurationError(f"roughness penalty needs px >= 3, got px={layout.px}")
        P1 = _pad_intercept(second_difference_matrix(layout.px))
        return PenaltyPair(P1=P1, P2=np.zeros((0, layout.num_columns)))

    if layout.px < 3 or layout.pz < 3:
        raise ConfigurationError(
            f"roughness penalties need px, pz >= 3, got px={layout.px}, pz={layout.pz}"
        )
    diff_x = second_difference_matrix(layout.px)
    diff_z = second_difference_matrix(layout.pz)

    if layout.kind is LayoutKind.INTERACTION:
        P1 = _pad_intercept(np.kron(diff_x, np.eye(layout.pz)))
        P2 = _pad_intercept(np.kron(np.eye(layout.px), diff_z))
        return PenaltyPair(P1=P1, P2=P2)

    P1 = _pad_intercept(np.column_stack([diff_x, np.zeros((layout.px - 2, layout.pz))]))
    P2 = _pad_intercept(np.column_stack([np.zeros((layout.pz - 2, layout.px)), diff_z]))
    return PenaltyPair(P1=P1, P2=P2)
