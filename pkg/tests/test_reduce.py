import numpy as np
import pytest
from scipy import optimize

from pspline_marginal.core.exceptions import (
    ConfigurationError,
    DataSchemaError,
    DomainError,
    ReductionError,
    SingularSystemError,
)
from pspline_marginal.models.logistic import expit, loglik
from pspline_marginal.reduction.reduce import (
    CovariateBlock,
    ReductionMethod,
    glm_linear_predictor,
    pca_first_component,
    project_reduction,
    reduce_block,
    rescale_unit,
    trim_extremes,
)


def _logistic_block(rng, n=400):
    values = rng.normal(size=(n, 2))
    y = rng.binomial(1, expit(0.2 + 1.2 * values[:, 0] - 0.7 * values[:, 1])).astype(float)
    return CovariateBlock(values=values, names=["a", "b"]), y


def test_rescale_unit_hits_both_ends():
    scaled, lower, upper = rescale_unit([3.0, 5.0, 4.0])

    np.testing.assert_allclose(scaled, [0.0, 1.0, 0.5])
    assert (lower, upper) == (3.0, 5.0)


def test_rescale_unit_rejects_constant_vector():
    with pytest.raises(DomainError):
        rescale_unit([2.0, 2.0])


def test_covariate_block_reports_missing_values():
    with pytest.raises(DataSchemaError, match="'b'"):
        CovariateBlock(values=np.array([[1.0, 2.0], [3.0, np.nan]]), names=["a", "b"])


def test_glm_linear_predictor_matches_maximum_likelihood(rng):
    block, y = _logistic_block(rng)
    design = np.column_stack([np.ones(400), block.values])

    reduced = glm_linear_predictor(block, y)
    result = optimize.minimize(lambda b: -loglik(b, design, y), np.zeros(3), method="BFGS", options={"gtol": 1e-9})

    np.testing.assert_allclose(reduced.coefficients, result.x, atol=1e-4)
    assert reduced.values.min() == 0.0 and reduced.values.max() == 1.0


def test_glm_linear_predictor_is_monotone_in_linear_predictor(rng):
    block, y = _logistic_block(rng)

    reduced = glm_linear_predictor(block, y)
    eta = reduced.coefficients[0] + block.values @ reduced.coefficients[1:]
    order = np.argsort(eta)

    assert np.all(np.diff(reduced.values[order]) >= 0)


def test_glm_linear_predictor_raises_on_duplicate_columns(rng):
    column = rng.normal(size=(50, 1))
    block = CovariateBlock(values=np.hstack([column, column]), names=["a", "a_copy"])

    with pytest.raises(SingularSystemError):
        glm_linear_predictor(block, rng.binomial(1, 0.5, size=50))


def test_glm_linear_predictor_raises_on_separation():
    values = np.linspace(-1, 1, 30)[:, None]
    block = CovariateBlock(values=values, names=["a"])

    with pytest.raises(ReductionError):
        glm_linear_predictor(block, (values[:, 0] > 0).astype(float))


def test_pca_first_component_hand_example():
    block = CovariateBlock(values=np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]), names=["a", "b"])

    reduced = pca_first_component(block)

    np.testing.assert_allclose(reduced.values, [0.0, 0.5, 1.0], atol=1e-12)
    np.testing.assert_allclose(reduced.loading, [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12)


def test_pca_sign_is_deterministic(rng):
    values = rng.normal(size=(100, 3))

    first = pca_first_component(CovariateBlock(values=values, names=["a", "b", "c"]))
    flipped = pca_first_component(CovariateBlock(values=-values, names=["a", "b", "c"]))

    assert first.loading[np.argmax(np.abs(first.loading))] > 0
    np.testing.assert_allclose(flipped.values, 1.0 - first.values, atol=1e-10)


def test_pca_drops_zero_variance_columns(rng):
    values = np.column_stack([rng.normal(size=20), np.full(20, 4.0), rng.normal(size=20)])

    reduced = pca_first_component(CovariateBlock(values=values, names=["a", "flat", "c"]))

    assert reduced.names == ["a", "c"]
    assert reduced.loading.shape == (2,)


def test_reduce_block_needs_response_for_linear_predictor(rng):
    block, _ = _logistic_block(rng, n=20)

    with pytest.raises(ConfigurationError):
        reduce_block(block, ReductionMethod.LINEAR_PREDICTOR)


def test_project_reduction_reproduces_fitted_values_and_clips(rng):
    block, _ = _logistic_block(rng)
    reduced = reduce_block(block, "pca")

    np.testing.assert_allclose(project_reduction(reduced, block), reduced.values, atol=1e-12)

    far = reduced.center + np.array([[1000.0], [-1000.0]]) * reduced.scale * reduced.loading
    extreme = CovariateBlock(values=far, names=["a", "b"])
    projected = project_reduction(reduced, extreme)
    assert projected.min() >= 0.0 and projected.max() <= 1.0
    assert set(projected) == {0.0, 1.0}


def test_trim_without_quantile_cut_only_rescales():
    x = np.array([2.0, 4.0, 3.0])
    z = np.array([10.0, 0.0, 5.0])

    trimmed = trim_extremes(x, z, [0, 1, 1], 0.0, 1.0)

    assert trimmed.removed == 0
    np.testing.assert_allclose(trimmed.x, [0.0, 1.0, 0.5])
    np.testing.assert_allclose(trimmed.z, [1.0, 0.0, 0.5])
    assert trimmed.x_range == (2.0, 4.0)


def test_trim_removes_rows_outside_quantiles():
    x = np.arange(100.0)

    trimmed = trim_extremes(x, None, np.zeros(100), 0.05, 0.95)

    np.testing.assert_array_equal(np.flatnonzero(trimmed.kept), np.arange(5, 95))
    assert trimmed.removed == 10
    assert trimmed.z is None
    np.testing.assert_allclose(trimmed.map_x([5.0, 94.0, 200.0]), [0.0, 1.0, 1.0])


@pytest.mark.parametrize("quantiles", [(0.5, 0.5), (-0.1, 0.9), (0.2, 1.1)])
def test_trim_rejects_invalid_quantiles(quantiles):
    with pytest.raises(ConfigurationError):
        trim_extremes(np.arange(5.0), None, np.zeros(5), *quantiles)
