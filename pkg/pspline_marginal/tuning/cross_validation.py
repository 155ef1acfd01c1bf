from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import KFold

from pspline_marginal.core.exceptions import (
    ConfigurationError,
    DomainError,
    PsplineMarginalError,
    TuningError,
)
from pspline_marginal.core.log import logger
from pspline_marginal.models import linear
from pspline_marginal.models.logistic import (
    RoughnessPenalty,
    expit,
    loglik,
    newton_raphson,
    replicate_data,
)
from pspline_marginal.models.problem import PenalizedProblem
from pspline_marginal.simulation.metrics import sum_of_squares
from pspline_marginal.tuning.contracts import (
    Lambda2Rule,
    LambdaGrid,
    SelectionMetric,
    TracePoint,
)
from pspline_marginal.tuning.search import scan_grid, select_best


def auc(scores, labels) -> float:
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=float).ravel()
    if scores.shape != labels.shape:
        raise DomainError(f"{scores.size} scores but {labels.size} labels")
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise DomainError("AUC labels must be coded 0/1")
    if np.unique(labels).size < 2:
        raise DomainError("AUC needs both classes present in the labels")
    return float(roc_auc_score(labels, scores))


def _fold_score(
    problem: PenalizedProblem,
    lambda1: float,
    train: np.ndarray,
    test: np.ndarray,
    metric: SelectionMetric,
) -> float:
    design_train = problem.design.take(train)
    y_train = problem.y[train]
    if problem.binary:
        design_train, y_train = replicate_data(design_train, y_train, problem.nrep)
        fit = newton_raphson(
            design_train,
            y_train,
            problem.newton,
            roughness=RoughnessPenalty(problem.penalty, lambda1),
        )
    else:
        fit = linear.fit1(design_train, y_train, problem.penalty, lambda1)

    design_test = problem.design.take(test)
    y_test = problem.y[test]
    eta = design_test.values @ fit.beta
    prediction = expit(eta) if problem.binary else eta
    if metric is SelectionMetric.SS:
        return sum_of_squares(prediction, y_test)
    if metric is SelectionMetric.LOGLIK:
        return loglik(fit.beta, design_test, y_test)
    return auc(prediction, y_test)


@dataclass(frozen=True)
class CrossValidationResult:
    lambda1: float
    medians: np.ndarray
    excluded: List[float]
    trace: List[TracePoint]


def kfold_cv_lambda1(
    problem: PenalizedProblem,
    grid: LambdaGrid,
    k: int = 10,
    metric: SelectionMetric = SelectionMetric.SS,
    *,
    seed: int = 0,
    threads: int = 1,
) -> CrossValidationResult:
    metric = SelectionMetric(metric)
    n_rows = problem.design.num_rows
    if k < 2:
        raise ConfigurationError(f"cross-validation needs k >= 2 folds, got {k}")
    if n_rows < k:
        raise ConfigurationError(f"cannot split {n_rows} rows into {k} folds")
    if not problem.binary and metric is not SelectionMetric.SS:
        raise ConfigurationError(f"metric {metric.value!r} needs a binary response")

    folds = list(KFold(n_splits=k, shuffle=True, random_state=seed).split(np.arange(n_rows)))

    def evaluate(task) -> float:
        lambda1, fold, (train, test) = task
        try:
            return _fold_score(problem, lambda1, train, test, metric)
        except PsplineMarginalError as error:
            logger.warning("lambda1={} fold {} excluded: {}", lambda1, fold, error)
            return float("nan")

    tasks = [(value, fold, split) for value in grid.values for fold, split in enumerate(folds)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        scores = np.array(list(executor.map(evaluate, tasks)), dtype=float).reshape(len(grid), k)

    trace = [
        TracePoint(
            stage="lambda1",
            lambda_=value,
            fold=fold,
            metric=metric.value,
            value=float(scores[row, fold]) if np.isfinite(scores[row, fold]) else None,
        )
        for row, value in enumerate(grid.values)
        for fold in range(k)
    ]
    medians = np.full(len(grid), np.nan)
    excluded = []
    for row, value in enumerate(grid.values):
        finite = scores[row][np.isfinite(scores[row])]
        if finite.size:
            medians[row] = float(np.median(finite))
        else:
            excluded.append(value)
            logger.warning("lambda1={} excluded: every fold failed", value)

    lambda1 = select_best(medians, grid, maximize=metric.maximize, stage="lambda1")
    logger.info("Cross-validation selected lambda1={} by median {}", lambda1, metric.value)
    return CrossValidationResult(lambda1=lambda1, medians=medians, excluded=excluded, trace=trace)


@dataclass(frozen=True)
class Lambda2Selection:
    lambda2: Optional[float]
    fit1_marginal_ss: float
    marginal_ss: np.ndarray
    trace: List[TracePoint]


def select_lambda2(
    problem: PenalizedProblem,
    lambda1: float,
    grid2: LambdaGrid,
    rule: Lambda2Rule = Lambda2Rule.FIFTY_PERCENT,
    *,
    threads: int = 1,
) -> Lambda2Selection:
    """Pick lambda2 against the marginal target carried by ``problem``.

    ``FIFTY_PERCENT`` returns the smallest grid value whose Fit2 marginal sum of
    squares is at most half of Fit1's, or ``None`` when no value qualifies.
    """
    rule = Lambda2Rule(rule)
    fit1_ss = sum_of_squares(problem.fit1(lambda1).marginal, problem.target)
    scores, trace = scan_grid(
        lambda value: sum_of_squares(problem.fit2(lambda1, value).marginal, problem.target),
        grid2,
        stage="lambda2",
        metric="ss_marginal",
        threads=threads,
    )
    if not np.isfinite(scores).any():
        raise TuningError("lambda2: every grid point failed to fit")

    if rule is Lambda2Rule.BEST_FIT2:
        lambda2 = select_best(scores, grid2, stage="lambda2")
    else:
        lambda2 = None
        if fit1_ss > 0:
            qualifying = np.flatnonzero(np.isfinite(scores) & (scores <= 0.5 * fit1_ss))
            if qualifying.size:
                lambda2 = grid2.values[int(qualifying[0])]
        if lambda2 is None:
            logger.warning("No lambda2 on the grid halves the Fit1 marginal sum of squares ({:.4g})", fit1_ss)
    logger.info("Rule {} selected lambda2={}", rule.value, lambda2)
    return Lambda2Selection(lambda2=lambda2, fit1_marginal_ss=fit1_ss, marginal_ss=scores, trace=trace)
