import numpy as np
import pytest
from scipy import optimize

from pspline_marginal.core.exceptions import ConfigurationError, ShapeError, SingularSystemError
from pspline_marginal.models.contracts import ModelId
from pspline_marginal.models.linear import fit0, fit1, fit2, penalized_sum_of_squares
from pspline_marginal.models.marginal import MarginalCurve, build_kernel, equidistant_test_points, marginal_projection
from pspline_marginal.spline.basis import BasisConvention, covariate_basis
from pspline_marginal.spline.design import PenaltyPair, build_roughness, build_univariate_design


def _target(kernel) -> MarginalCurve:
    return MarginalCurve(x_test=kernel.x_test, theta=0.4 + 0.3 * np.sin(3 * kernel.x_test))


def _response(x, z, rng) -> np.ndarray:
    return np.sin(2 * np.pi * x) * z + 0.1 * rng.normal(size=x.size)


def test_fit0_with_intercept_only_design_is_the_mean():
    y = np.array([1.0, 2.0, 6.0, 7.0])

    fit = fit0(np.ones((4, 1)), y)

    assert fit.model_id is ModelId.FIT0
    assert fit.beta[0] == pytest.approx(4.0)
    np.testing.assert_allclose(fit.fitted, 4.0)


def test_fit0_interpolates_with_square_invertible_design(rng):
    D = rng.normal(size=(5, 5)) + 3 * np.eye(5)
    y = rng.normal(size=5)

    np.testing.assert_allclose(fit0(D, y).fitted, y, atol=1e-10)


def test_fit1_matches_numerical_minimiser(rng):
    D = rng.normal(size=(30, 4))
    y = rng.normal(size=30)
    P = PenaltyPair(P1=np.diff(np.eye(4), n=2, axis=0), P2=np.eye(4)[1:])

    fit = fit1(D, y, P, 0.7)
    result = optimize.minimize(
        lambda b: penalized_sum_of_squares(b, D, y, P=P, lambda1=0.7), np.zeros(4), method="BFGS",
        options={"gtol": 1e-10},
    )

    np.testing.assert_allclose(fit.beta, result.x, atol=1e-5)


def test_fit2_matches_numerical_minimiser(rng):
    D = rng.normal(size=(30, 4))
    y = rng.normal(size=30)
    P = PenaltyPair(P1=np.diff(np.eye(4), n=2, axis=0), P2=np.zeros((1, 4)))
    W = rng.uniform(size=(6, 4))
    target = rng.uniform(size=6)

    fit = fit2(D, y, P, W, target, 0.3, 2.0)
    result = optimize.minimize(
        lambda b: penalized_sum_of_squares(b, D, y, P=P, lambda1=0.3, W=W, theta_target=target, lambda2=2.0),
        np.zeros(4),
        method="BFGS",
        options={"gtol": 1e-10},
    )

    np.testing.assert_allclose(fit.beta, result.x, atol=1e-5)
    np.testing.assert_allclose(fit.marginal.theta, W @ fit.beta)


def test_fit1_fitted_values_match_augmented_least_squares(interaction_problem_parts, rng):
    x, z, design, penalty, _ = interaction_problem_parts
    y = _response(x, z, rng)
    lambda1 = 0.5

    fit = fit1(design, y, penalty, lambda1)
    augmented = np.vstack([design.values, np.sqrt(lambda1) * penalty.P1, np.sqrt(lambda1) * penalty.P2])
    rhs = np.concatenate([y, np.zeros(penalty.P1.shape[0] + penalty.P2.shape[0])])
    beta_ls, *_ = np.linalg.lstsq(augmented, rhs, rcond=None)

    np.testing.assert_allclose(fit.fitted, design.values @ beta_ls, atol=1e-8)


def test_structural_null_direction_is_pinned_to_zero(interaction_problem_parts, rng):
    x, z, design, penalty, _ = interaction_problem_parts

    fit = fit1(design, _response(x, z, rng), penalty, 0.5)

    for direction in design.layout.null_directions():
        assert abs(direction @ fit.beta) < 1e-8


def test_fit_nesting_identities(interaction_problem_parts, rng):
    x, z, design, penalty, kernel = interaction_problem_parts
    y = _response(x, z, rng)
    W = marginal_projection(kernel, design)

    base = fit0(design, y)
    np.testing.assert_allclose(fit1(design, y, penalty, 0.0).beta, base.beta, atol=1e-12)
    np.testing.assert_allclose(
        fit2(design, y, penalty, W, _target(kernel), 0.8, 0.0).beta,
        fit1(design, y, penalty, 0.8).beta,
        atol=1e-12,
    )


def test_fit2_marginal_is_kernel_smoothed_fit(interaction_problem_parts, rng):
    x, z, design, penalty, kernel = interaction_problem_parts
    W = marginal_projection(kernel, design)

    fit = fit2(design, _response(x, z, rng), penalty, W, _target(kernel), 0.5, 3.0)

    np.testing.assert_allclose(fit.marginal.theta, kernel.K @ fit.fitted, atol=1e-12)
    np.testing.assert_array_equal(fit.marginal.x_test, kernel.x_test)


def test_fit2_marginal_gap_shrinks_as_lambda2_grows(interaction_problem_parts, rng):
    x, z, design, penalty, kernel = interaction_problem_parts
    y = _response(x, z, rng)
    W = marginal_projection(kernel, design)
    target = _target(kernel)

    gaps = [
        np.linalg.norm(fit2(design, y, penalty, W, target, 0.5, lambda2).marginal.theta - target.theta)
        for lambda2 in (0.0, 0.1, 1.0, 10.0, 100.0, 1000.0)
    ]

    assert all(later <= earlier + 1e-10 for earlier, later in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0]


def test_fit2_reaches_attainable_target():
    x = np.linspace(0.0, 1.0, 40)
    y = np.sin(2 * np.pi * x) + 0.3 * np.cos(17 * x)
    design = build_univariate_design(covariate_basis(x, 6, convention=BasisConvention.DROP_FIRST))
    penalty = build_roughness(design.layout)
    kernel = build_kernel(x, equidistant_test_points(100), 0.1)
    W = marginal_projection(kernel, design)
    target = W @ np.concatenate([[0.5], np.linspace(0.0, 2.0, 6)])

    gaps = [
        np.linalg.norm(fit2(design, y, penalty, W, target, 0.5, lambda2).marginal.theta - target)
        for lambda2 in (1.0, 10.0, 100.0, 1e4)
    ]

    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3 * gaps[0]


def test_fit2_solves_normal_equations(interaction_problem_parts, rng):
    x, z, design, penalty, kernel = interaction_problem_parts
    y = _response(x, z, rng)
    W = marginal_projection(kernel, design)
    target = _target(kernel)

    fit = fit2(design, y, penalty, W, target, 0.5, 4.0)
    X = design.values
    system = X.T @ X + 0.5 * penalty.omega + 4.0 * W.T @ W
    rhs = X.T @ y + 4.0 * W.T @ target.theta

    assert np.max(np.abs(system @ fit.beta - rhs)) < 1e-8 * max(1.0, np.max(np.abs(rhs)))


def test_fit2_estimate_minimises_its_objective(interaction_problem_parts, rng):
    x, z, design, penalty, kernel = interaction_problem_parts
    y = _response(x, z, rng)
    W = marginal_projection(kernel, design)
    target = _target(kernel)

    fit = fit2(design, y, penalty, W, target, 0.5, 4.0)

    def objective(beta):
        return penalized_sum_of_squares(
            beta, design, y, P=penalty, lambda1=0.5, W=W, theta_target=target, lambda2=4.0
        )

    best = objective(fit.beta)
    for _ in range(20):
        assert best <= objective(fit.beta + 1e-3 * rng.normal(size=fit.beta.size)) + 1e-12


def test_fit0_raises_on_duplicated_columns(rng):
    column = rng.normal(size=(20, 1))
    D = np.hstack([column, column, rng.normal(size=(20, 1))])

    with pytest.raises(SingularSystemError):
        fit0(D, rng.normal(size=20))


def test_fit1_rejects_negative_lambda(interaction_problem_parts):
    _, _, design, penalty, _ = interaction_problem_parts

    with pytest.raises(ConfigurationError):
        fit1(design, np.zeros(design.num_rows), penalty, -1.0)


def test_fit0_rejects_response_length_mismatch(rng):
    with pytest.raises(ShapeError):
        fit0(rng.normal(size=(10, 2)), np.zeros(9))
