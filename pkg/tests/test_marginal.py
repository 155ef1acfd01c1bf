import numpy as np
import pytest
from scipy import integrate, stats

from pspline_marginal.core.exceptions import ConfigurationError, DomainError, ShapeError
from pspline_marginal.models.marginal import (
    KernelSmoother,
    build_kernel,
    estimate_marginal_logistic,
    marginal_projection,
    smooth_marginal,
    true_marginal_oracle,
)
from pspline_marginal.simulation.surfaces import surface_interaction


def test_build_kernel_rows_sum_to_one(rng):
    kernel = build_kernel(rng.uniform(size=200), np.linspace(0, 1, 100), 0.1)

    assert kernel.K.shape == (100, 200)
    assert np.max(np.abs(kernel.K.sum(axis=1) - 1.0)) < 1e-12
    assert kernel.K.min() > 0


def test_build_kernel_flat_limit_is_uniform(rng):
    kernel = build_kernel(rng.uniform(size=50), np.linspace(0, 1, 7), 1e6)

    np.testing.assert_allclose(kernel.K, 1.0 / 50, rtol=1e-9)


def test_build_kernel_matches_normal_density_weights():
    kernel = build_kernel([0.0, 1.0], [0.0], 1.0)
    weights = stats.norm.pdf([0.0, 1.0])

    np.testing.assert_allclose(kernel.K[0], weights / weights.sum(), rtol=1e-12)
    np.testing.assert_allclose(kernel.K[0], [0.6224593312, 0.3775406688], atol=1e-9)


@pytest.mark.parametrize("sigma_k", [0.0, -0.5])
def test_build_kernel_rejects_non_positive_bandwidth(sigma_k):
    with pytest.raises(ConfigurationError):
        build_kernel([0.1, 0.2], [0.5], sigma_k)


def test_marginal_projection_with_identity_kernel_returns_design(rng):
    D = rng.normal(size=(6, 3))
    kernel = KernelSmoother(x_test=np.arange(6.0), sigma_k=0.1, K=np.eye(6))

    np.testing.assert_array_equal(marginal_projection(kernel, D), D)


def test_marginal_projection_passes_intercept_through(rng):
    kernel = build_kernel(rng.uniform(size=30), np.linspace(0, 1, 9), 0.2)
    D = np.column_stack([np.ones(30), rng.normal(size=(30, 4))])
    beta = np.array([2.5, 0, 0, 0, 0])

    np.testing.assert_allclose(marginal_projection(kernel, D) @ beta, 2.5, atol=1e-12)


def test_marginal_projection_hand_product():
    K = np.array([[0.5, 0.5], [1.0, 0.0], [0.25, 0.75]])
    D = np.array([[1.0, 2.0], [1.0, 4.0]])

    np.testing.assert_allclose(marginal_projection(K, D), [[1.0, 3.0], [1.0, 2.0], [1.0, 3.5]])


def test_marginal_projection_rejects_shape_mismatch():
    with pytest.raises(ShapeError):
        marginal_projection(np.ones((2, 3)), np.ones((4, 2)))


def test_estimate_marginal_logistic_preserves_constant_probabilities(rng):
    kernel = build_kernel(rng.uniform(size=40), np.linspace(0, 1, 5), 0.1)

    curve = estimate_marginal_logistic(kernel, np.full(40, 0.3))

    np.testing.assert_allclose(curve.theta, 0.3, atol=1e-12)


def test_estimate_marginal_logistic_uniform_kernel_averages():
    kernel = KernelSmoother(x_test=np.array([0.1, 0.9]), sigma_k=1.0, K=np.full((2, 2), 0.5))

    np.testing.assert_allclose(estimate_marginal_logistic(kernel, [0.2, 0.4]).theta, [0.3, 0.3])


def test_estimate_marginal_logistic_hand_weighted_means():
    K = np.array([[0.2, 0.3, 0.5], [0.6, 0.4, 0.0]])
    kernel = KernelSmoother(x_test=np.array([0.0, 1.0]), sigma_k=0.5, K=K)

    curve = estimate_marginal_logistic(kernel, [0.1, 0.5, 0.9])

    np.testing.assert_allclose(curve.theta, [0.02 + 0.15 + 0.45, 0.06 + 0.2])


def test_estimate_marginal_logistic_rejects_boundary_probabilities():
    kernel = KernelSmoother(x_test=np.array([0.0]), sigma_k=1.0, K=np.array([[0.5, 0.5]]))

    with pytest.raises(DomainError):
        estimate_marginal_logistic(kernel, [0.0, 0.5])


def test_smoothing_is_shift_equivariant(rng):
    kernel = build_kernel(rng.uniform(size=40), np.linspace(0, 1, 11), 0.1)
    fitted = rng.normal(size=40)

    shifted = smooth_marginal(kernel, fitted + 1.75).theta

    np.testing.assert_allclose(shifted, smooth_marginal(kernel, fitted).theta + 1.75, atol=1e-12)


def test_marginal_variance_does_not_increase_with_bandwidth(rng):
    x_H = rng.uniform(size=200)
    fitted = np.sin(6 * x_H) + 0.3 * rng.normal(size=200)
    x_test = np.linspace(0, 1, 100)

    variances = [
        smooth_marginal(build_kernel(x_H, x_test, sigma_k), fitted).theta.var()
        for sigma_k in (0.01, 0.05, 0.1, 0.5, 5.0)
    ]

    assert all(later <= earlier + 1e-12 for earlier, later in zip(variances, variances[1:]))


def test_true_marginal_oracle_of_x_only_surface():
    x_test = np.linspace(0, 1, 17)

    curve = true_marginal_oracle(lambda x, z: x + 0 * z, x_test, 50)

    np.testing.assert_allclose(curve.theta, x_test, atol=1e-15)


def test_true_marginal_oracle_of_z_surface_matches_integral():
    curve = true_marginal_oracle(lambda x, z: z + 0 * x, np.linspace(0, 1, 5), 10_000)

    np.testing.assert_allclose(curve.theta, 0.5, atol=1e-3)


def test_true_marginal_oracle_matches_quadrature_on_interaction_surface():
    curve = true_marginal_oracle(surface_interaction, [0.2], 10_000)
    expected, _ = integrate.quad(lambda z: float(surface_interaction(0.2, z)), 0.0, 1.0)

    assert curve.theta[0] == pytest.approx(expected, abs=1e-4)


def test_marginal_of_logistic_model_with_binary_z_is_not_logistic():
    # z 取 0/1 各一半：中点网格 0.25 与 0.75 分别落在两侧
    def theta(x, z):
        return 1.0 / (1.0 + np.exp(-(-1.0 + 2.0 * x + 3.0 * (z > 0.5))))

    x_test = np.linspace(-3, 3, 61)
    curve = true_marginal_oracle(theta, x_test, 2)
    logit = np.log(curve.theta / (1 - curve.theta))
    slopes = np.diff(logit) / np.diff(x_test)

    np.testing.assert_allclose(curve.theta, 0.5 * (theta(x_test, 0.0) + theta(x_test, 1.0)), atol=1e-12)
    assert slopes.max() - slopes.min() > 0.1
