from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pspline_marginal.core.exceptions import PsplineMarginalError
from pspline_marginal.core.log import logger
from pspline_marginal.models.contracts import LogisticFit, ModelId
from pspline_marginal.models.marginal import MarginalCurve, build_kernel
from pspline_marginal.models.problem import Fit, PenalizedProblem
from pspline_marginal.simulation.config import FitRecipe, SimConfig
from pspline_marginal.simulation.generate import SimDataset, generate
from pspline_marginal.simulation.metrics import (
    ss_fitted,
    ss_marginal,
    wss_fitted,
    wss_marginal,
)
from pspline_marginal.spline.basis import covariate_basis
from pspline_marginal.spline.design import build_design, build_roughness

MODELS = (ModelId.FIT0, ModelId.FIT1, ModelId.FIT2)
SLICE_Z_VALUES = (0.2, 0.4, 0.6, 0.8)


def metric_names(binary: bool) -> Tuple[str, ...]:
    if binary:
        return ("wss_fitted", "wss_marginal", "ss_fitted", "ss_marginal")
    return ("ss_fitted", "ss_marginal")


def prepare_problem(config: SimConfig, dataset: SimDataset, recipe: Optional[FitRecipe] = None) -> PenalizedProblem:
    Bx = covariate_basis(dataset.x, config.px, degree=config.degree, convention=config.basis)
    Bz = covariate_basis(dataset.z, config.pz, degree=config.degree, convention=config.basis)
    design = build_design(Bx, Bz, interaction=config.interaction, strict=True)
    kernel = build_kernel(dataset.x, dataset.theta_true_marginal.x_test, config.sigma_k)
    return PenalizedProblem(
        design=design,
        y=dataset.y,
        penalty=build_roughness(design.layout),
        kernel=kernel,
        target=dataset.theta_true_marginal,
        binary=dataset.binary,
        nrep=dataset.nrep,
        newton=(recipe or FitRecipe()).newton,
    )


def fit_models(problem: PenalizedProblem, recipe: FitRecipe, model: ModelId) -> Fit:
    if model is ModelId.FIT0:
        return problem.fit0()
    if model is ModelId.FIT1:
        return problem.fit1(recipe.lambda1a)
    return problem.fit2(recipe.lambda1b, recipe.lambda2)


def score_fit(fit: Fit, dataset: SimDataset) -> Dict[str, float]:
    truth = dataset.truth
    marginal_truth = dataset.theta_true_marginal
    scores = {"ss_fitted": ss_fitted(fit, truth), "ss_marginal": ss_marginal(fit, marginal_truth)}
    if dataset.binary:
        scores["wss_fitted"] = wss_fitted(fit, truth)
        scores["wss_marginal"] = wss_marginal(fit, marginal_truth)
    return scores


@dataclass(frozen=True)
class ReplicateOutcome:
    index: int
    scores: Dict[ModelId, Dict[str, float]]
    failures: Dict[ModelId, str]
    flagged: Tuple[ModelId, ...]
    curves: Dict[ModelId, MarginalCurve]


def evaluate_replicate(config: SimConfig, recipe: FitRecipe, index: int) -> ReplicateOutcome:
    dataset = generate(config, replicate=index)
    problem = prepare_problem(config, dataset, recipe)
    scores, failures, curves, flagged = {}, {}, {}, []
    for model in MODELS:
        try:
            fit = fit_models(problem, recipe, model)
        except PsplineMarginalError as error:
            logger.warning("Replicate {}: {} failed: {}", index, model.value, error)
            failures[model] = str(error)
            continue
        if isinstance(fit, LogisticFit) and (not fit.converged or fit.separation_warning):
            flagged.append(model)
        scores[model] = score_fit(fit, dataset)
        curves[model] = fit.marginal
    return ReplicateOutcome(
        index=index,
        scores=scores,
        failures=failures,
        flagged=tuple(flagged),
        curves=curves,
    )


@dataclass(frozen=True)
class BatchRow:
    model: ModelId
    metric: str
    mean: float
    n_ok: int
    n_failed: int
    n_flagged: int


@dataclass(frozen=True)
class BatchResult:
    config: SimConfig
    recipe: FitRecipe
    rows: List[BatchRow]
    true_marginal: MarginalCurve
    # 第一个成功副本的边际曲线，用于绘图
    curves: Dict[ModelId, MarginalCurve] = field(default_factory=dict)

    def mean(self, model: ModelId, metric: str) -> float:
        for row in self.rows:
            if row.model is model and row.metric == metric:
                return row.mean
        raise KeyError(f"{model.value}/{metric}")


def _aggregate(config: SimConfig, outcomes: Sequence[ReplicateOutcome]) -> List[BatchRow]:
    rows = []
    for model in MODELS:
        ok = [outcome.scores[model] for outcome in outcomes if model in outcome.scores]
        n_failed = sum(model in outcome.failures for outcome in outcomes)
        n_flagged = sum(model in outcome.flagged for outcome in outcomes)
        for metric in metric_names(config.binary):
            values = [scores[metric] for scores in ok]
            mean = float(np.mean(values)) if values else float("nan")
            rows.append(
                BatchRow(
                    model=model,
                    metric=metric,
                    mean=mean,
                    n_ok=len(ok),
                    n_failed=n_failed,
                    n_flagged=n_flagged,
                )
            )
    return rows


def run_batch(config: SimConfig, recipe: FitRecipe, *, threads: int = 1) -> BatchResult:
    logger.info(
        "Running {} replicates: interaction={}, n_h={}, sigma={}, px={}, pz={}, binary={}, nrep={}",
        config.nsim,
        config.interaction,
        config.n_h,
        config.sigma_noise,
        config.px,
        config.pz,
        config.binary,
        config.nrep,
    )
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        outcomes = list(
            executor.map(lambda index: evaluate_replicate(config, recipe, index), range(config.nsim))
        )

    curves = next((outcome.curves for outcome in outcomes if outcome.curves), {})
    true_marginal = generate(config, replicate=0).theta_true_marginal
    rows = _aggregate(config, outcomes)
    failed = sum(len(outcome.failures) for outcome in outcomes)
    if failed:
        logger.warning("{} model fit(s) failed across {} replicates", failed, config.nsim)
    logger.info(
        "Batch finished: {}",
        ", ".join(f"{row.model.value} {row.metric}={row.mean:.4g}" for row in rows if row.metric.endswith("fitted")),
    )
    return BatchResult(config=config, recipe=recipe, rows=rows, true_marginal=true_marginal, curves=curves)


@dataclass(frozen=True)
class SurfaceSlice:
    z: float
    x: np.ndarray
    truth: np.ndarray
    fitted: Dict[ModelId, np.ndarray]


@dataclass(frozen=True)
class SingleComparison:
    scores: Dict[ModelId, Dict[str, float]]
    fits: Dict[ModelId, Fit]
    true_marginal: MarginalCurve
    slices: List[SurfaceSlice]


def compare_single(config: SimConfig, recipe: FitRecipe, *, replicate: int = 0) -> SingleComparison:
    """Fit all three models to one dataset and collect plot-ready curves."""
    dataset = generate(config, replicate=replicate)
    problem = prepare_problem(config, dataset, recipe)
    fits = {model: fit_models(problem, recipe, model) for model in MODELS}
    scores = {model: score_fit(fit, dataset) for model, fit in fits.items()}

    slices = []
    for z_value in SLICE_Z_VALUES:
        # 网格上与目标 z 最接近的一行
        nearest = dataset.z[np.argmin(np.abs(dataset.z - z_value))]
        rows = np.flatnonzero(np.isclose(dataset.z, nearest))
        rows = rows[np.argsort(dataset.x[rows])]
        slices.append(
            SurfaceSlice(
                z=float(nearest),
                x=dataset.x[rows],
                truth=dataset.truth[rows],
                fitted={model: fit.response[rows] for model, fit in fits.items()},
            )
        )
    return SingleComparison(
        scores=scores,
        fits=fits,
        true_marginal=dataset.theta_true_marginal,
        slices=slices,
    )
