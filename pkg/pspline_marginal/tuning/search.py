"""Truth-based sequential grid search for the three penalty weights.

Order: lambda1a minimises Fit1's error against the truth; lambda2 is then
scanned for Fit2 with lambda1 = lambda1a; finally lambda1b is rescanned for
Fit2 at the chosen lambda2. Ties go to the smaller lambda.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from pspline_marginal.core.exceptions import PsplineMarginalError, TuningError
from pspline_marginal.core.log import logger
from pspline_marginal.models.problem import Fit, PenalizedProblem
from pspline_marginal.simulation.batch import prepare_problem
from pspline_marginal.simulation.config import FitRecipe, SimConfig
from pspline_marginal.simulation.generate import generate
from pspline_marginal.simulation.metrics import ss_fitted, wss_fitted
from pspline_marginal.tuning.contracts import LambdaGrid, TracePoint, TuningReport


def scan_grid(
    evaluate: Callable[[float], float],
    grid: LambdaGrid,
    *,
    stage: str,
    metric: str,
    threads: int = 1,
) -> Tuple[np.ndarray, List[TracePoint]]:
    def safe(value: float) -> float:
        try:
            return float(evaluate(value))
        except PsplineMarginalError as error:
            logger.warning("{}: lambda={} failed: {}", stage, value, error)
            return float("nan")

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        scores = np.array(list(executor.map(safe, grid.values)), dtype=float)
    trace = [
        TracePoint(
            stage=stage,
            lambda_=value,
            metric=metric,
            value=float(score) if np.isfinite(score) else None,
        )
        for value, score in zip(grid.values, scores)
    ]
    return scores, trace


def select_best(scores: np.ndarray, grid: LambdaGrid, *, maximize: bool = False, stage: str = "") -> float:
    finite = np.isfinite(scores)
    if not finite.any():
        raise TuningError(f"{stage}: every grid point failed to fit")
    # nanargmin/nanargmax 返回第一个最优位置，即更小的 lambda
    index = int(np.nanargmax(scores) if maximize else np.nanargmin(scores))
    return grid.values[index]


def truth_metric(problem: PenalizedProblem) -> Tuple[str, Callable[[Fit, np.ndarray], float]]:
    if problem.binary:
        return "wss_fitted", wss_fitted
    return "ss_fitted", ss_fitted


def sequential_search(
    problem: PenalizedProblem,
    truth,
    grid1: LambdaGrid,
    grid2: LambdaGrid,
    *,
    threads: int = 1,
) -> TuningReport:
    truth = np.asarray(truth, dtype=float)
    metric, score = truth_metric(problem)

    scores_1a, trace = scan_grid(
        lambda value: score(problem.fit1(value), truth),
        grid1, stage="lambda1a", metric=metric, threads=threads,
    )
    lambda1a = select_best(scores_1a, grid1, stage="lambda1a")

    scores_2, trace_2 = scan_grid(
        lambda value: score(problem.fit2(lambda1a, value), truth),
        grid2, stage="lambda2", metric=metric, threads=threads,
    )
    lambda2 = select_best(scores_2, grid2, stage="lambda2")

    scores_1b, trace_1b = scan_grid(
        lambda value: score(problem.fit2(value, lambda2), truth),
        grid1, stage="lambda1b", metric=metric, threads=threads,
    )
    lambda1b = select_best(scores_1b, grid1, stage="lambda1b")

    logger.info("Selected lambda1a={}, lambda2={}, lambda1b={}", lambda1a, lambda2, lambda1b)
    return TuningReport(
        mode="simulation",
        lambda1a=lambda1a,
        lambda1b=lambda1b,
        lambda2=lambda2,
        metric=metric,
        traces=trace + trace_2 + trace_1b,
    )


@dataclass(frozen=True)
class BatchTuning:
    lambda1a: float
    lambda1b: float
    lambda2: float
    reports: List[Optional[TuningReport]]

    @property
    def n_failed(self) -> int:
        return sum(report is None for report in self.reports)


def tune_batch(
    config: SimConfig,
    grid1: LambdaGrid,
    grid2: LambdaGrid,
    *,
    recipe: Optional[FitRecipe] = None,
    threads: int = 1,
) -> BatchTuning:
    def tune_replicate(index: int) -> Optional[TuningReport]:
        dataset = generate(config, replicate=index)
        problem = prepare_problem(config, dataset, recipe)
        try:
            return sequential_search(problem, dataset.truth, grid1, grid2)
        except TuningError as error:
            logger.warning("Replicate {}: tuning failed: {}", index, error)
            return None

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        reports = list(executor.map(tune_replicate, range(config.nsim)))

    selected = [report for report in reports if report is not None]
    if not selected:
        raise TuningError(f"tuning failed on all {config.nsim} replicates")
    return BatchTuning(
        lambda1a=float(np.mean([report.lambda1a for report in selected])),
        lambda1b=float(np.mean([report.lambda1b for report in selected])),
        lambda2=float(np.mean([report.lambda2 for report in selected])),
        reports=reports,
    )
