"""Horizontal/vertical pipeline: reduce, trim, estimate the vertical marginal, fit H."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from pspline_marginal.core.exceptions import ConfigurationError, DomainError
from pspline_marginal.core.log import logger
from pspline_marginal.cli.config import DataConfig, ModelConfig, SelectionConfig, grid_pair
from pspline_marginal.cli.io import load_cohort
from pspline_marginal.models.contracts import LogisticFit, ModelId, NewtonConfig
from pspline_marginal.models.marginal import MarginalCurve, build_kernel
from pspline_marginal.models.problem import Fit, PenalizedProblem
from pspline_marginal.models.vertical import VerticalMarginal, fit_vertical_marginal
from pspline_marginal.reduction.reduce import (
    ReducedVector,
    ReductionMethod,
    project_reduction,
    reduce_block,
    trim_extremes,
)
from pspline_marginal.simulation.metrics import sum_of_squares
from pspline_marginal.spline.basis import BasisSpec, eval_basis
from pspline_marginal.spline.design import build_design, build_roughness
from pspline_marginal.tuning.contracts import TuningReport
from pspline_marginal.tuning.cross_validation import kfold_cv_lambda1, select_lambda2


@dataclass(frozen=True)
class PreparedData:
    x_h: np.ndarray
    z_h: np.ndarray
    y_h: np.ndarray
    x_v: np.ndarray
    y_v: np.ndarray
    summary: Dict[str, Any] = field(default_factory=dict)


def _reduction_summary(reduced: ReducedVector) -> Dict[str, Any]:
    summary = {"method": reduced.method.value, "covariates": reduced.names}
    if reduced.method is ReductionMethod.LINEAR_PREDICTOR:
        summary["coefficients"] = reduced.coefficients
    else:
        summary["loading"] = reduced.loading
    return summary


def _check_unit(name: str, values: np.ndarray) -> None:
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise DomainError(f"pre-reduced column {name} must lie in [0, 1], got [{values.min()}, {values.max()}]")


def prepare_data(data: DataConfig, *, binary: bool, newton: Optional[NewtonConfig] = None) -> PreparedData:
    horizontal = load_cohort(data.h_csv, data.h_manifest, with_z=True, binary=binary)
    vertical = load_cohort(data.v_csv, data.v_manifest, with_z=False, binary=binary)
    if data.reduction is ReductionMethod.LINEAR_PREDICTOR and not binary and not horizontal.is_reduced:
        raise ConfigurationError("linear predictor reduction needs a binary response; use --method pca")

    summary: Dict[str, Any] = {}
    if horizontal.is_reduced:
        x_h, z_h = horizontal.x, horizontal.z
    else:
        x_reduced = reduce_block(horizontal.x_block, data.reduction, horizontal.y, newton=newton)
        z_reduced = reduce_block(horizontal.z_block, data.reduction, horizontal.y, newton=newton)
        x_h, z_h = x_reduced.values, z_reduced.values
        summary["x"] = _reduction_summary(x_reduced)
        summary["z"] = _reduction_summary(z_reduced)
    _check_unit("x", x_h)
    _check_unit("z", z_h)

    if vertical.is_reduced:
        x_v = vertical.x
        _check_unit("x", x_v)
    elif horizontal.is_reduced:
        raise ConfigurationError("raw vertical covariates need a raw horizontal file to fit the reduction on")
    else:
        x_v = project_reduction(x_reduced, vertical.x_block)

    y_h, y_v = horizontal.y, vertical.y
    if data.trims:
        trimmed = trim_extremes(x_h, z_h, y_h, data.trim_lower, data.trim_upper)
        x_h, z_h, y_h = trimmed.x, trimmed.z, trimmed.y
        x_v = trimmed.map_x(x_v)
        summary["trim"] = {"removed": trimmed.removed, "x_range": trimmed.x_range, "z_range": trimmed.z_range}
    logger.info("Prepared {} horizontal and {} vertical rows", y_h.size, y_v.size)
    return PreparedData(x_h=x_h, z_h=z_h, y_h=y_h, x_v=x_v, y_v=y_v, summary=summary)


def build_horizontal_problem(
    prepared: PreparedData, model: ModelConfig, vertical: VerticalMarginal
) -> PenalizedProblem:
    Bx = eval_basis(BasisSpec(num_basis=model.px, degree=model.degree), prepared.x_h)
    Bz = eval_basis(BasisSpec(num_basis=model.pz, degree=model.degree), prepared.z_h)
    design = build_design(Bx, Bz, interaction=model.interaction, strict=True)
    # 应用模式下 x_test 取观测到的 x_H
    kernel = build_kernel(prepared.x_h, prepared.x_h, model.sigma_k)
    target = MarginalCurve(x_test=prepared.x_h, theta=vertical.evaluate(prepared.x_h))
    return PenalizedProblem(
        design=design,
        y=prepared.y_h,
        penalty=build_roughness(design.layout),
        kernel=kernel,
        target=target,
        binary=model.binary,
        newton=model.newton,
    )


def estimate_vertical(prepared: PreparedData, model: ModelConfig) -> VerticalMarginal:
    return fit_vertical_marginal(
        prepared.x_v,
        prepared.y_v,
        BasisSpec(num_basis=model.px, degree=model.degree),
        model.lambda1_v,
        binary=model.binary,
        newton=model.newton,
    )


def tune_penalties(
    problem: PenalizedProblem, selection: SelectionConfig, *, threads: int
) -> TuningReport:
    grid1, grid2 = grid_pair(selection)
    cv = kfold_cv_lambda1(
        problem, grid1, selection.folds, selection.metric, seed=selection.seed, threads=threads
    )
    chosen = select_lambda2(problem, cv.lambda1, grid2, selection.rule, threads=threads)
    return TuningReport(
        mode="cv",
        lambda1a=cv.lambda1,
        lambda1b=cv.lambda1,
        lambda2=chosen.lambda2,
        metric=selection.metric.value,
        selection_rule=selection.rule,
        cv_folds=selection.folds,
        excluded=cv.excluded,
        traces=cv.trace + chosen.trace,
    )


def _fit_summary(fit: Fit, target: MarginalCurve) -> Dict[str, Any]:
    summary = {
        "model": fit.model_id.value,
        "lambda1": fit.lambda1,
        "lambda2": fit.lambda2,
        "beta": fit.beta,
        "marginal_ss": sum_of_squares(fit.marginal, target),
    }
    if isinstance(fit, LogisticFit):
        summary.update(
            converged=fit.converged,
            iterations=fit.iterations,
            final_step_norm=fit.final_step_norm,
            separation_warning=fit.separation_warning,
        )
    return summary


@dataclass(frozen=True)
class FitOutcome:
    problem: PenalizedProblem
    vertical: VerticalMarginal
    fits: Dict[ModelId, Optional[Fit]]
    tuning: Optional[TuningReport]
    summaries: Dict[str, Any]


def run_application_fit(
    data: DataConfig,
    model: ModelConfig,
    selection: SelectionConfig,
    *,
    lambda1: Optional[float],
    lambda2: Optional[float],
    tune: bool,
    threads: int = 1,
) -> FitOutcome:
    prepared = prepare_data(data, binary=model.binary, newton=model.newton)
    vertical = estimate_vertical(prepared, model)
    problem = build_horizontal_problem(prepared, model, vertical)

    tuning = None
    if tune:
        tuning = tune_penalties(problem, selection, threads=threads)
        lambda1, lambda2 = tuning.lambda1a, tuning.lambda2

    fits: Dict[ModelId, Optional[Fit]] = {
        ModelId.FIT0: problem.fit0(),
        ModelId.FIT1: problem.fit1(lambda1),
        ModelId.FIT2: None,
    }
    if lambda2 is None:
        logger.warning("lambda2 is NA, Fit2 is not fitted")
    else:
        fits[ModelId.FIT2] = problem.fit2(lambda1, lambda2)

    summaries = {
        model_id.value: (_fit_summary(fit, problem.target) if fit is not None else None)
        for model_id, fit in fits.items()
    }
    summaries["preparation"] = prepared.summary
    return FitOutcome(problem=problem, vertical=vertical, fits=fits, tuning=tuning, summaries=summaries)
