import numpy as np
import pytest
from scipy.interpolate import BSpline
from scipy.special import comb

from pspline_marginal.core.exceptions import ConfigurationError, DomainError
from pspline_marginal.spline.basis import (
    BasisConvention,
    BasisSpec,
    covariate_basis,
    eval_basis,
    make_knot_vector,
    second_difference_matrix,
)


def test_make_knot_vector_minimal_cubic_has_no_interior_knots():
    knots = make_knot_vector(BasisSpec(num_basis=4, degree=3)).knots

    np.testing.assert_array_equal(knots, [0, 0, 0, 0, 1, 1, 1, 1])


def test_make_knot_vector_places_single_interior_knot_at_midpoint():
    knots = make_knot_vector(BasisSpec(num_basis=5, degree=3)).knots

    np.testing.assert_array_equal(knots, [0, 0, 0, 0, 0.5, 1, 1, 1, 1])


def test_make_knot_vector_linear_case():
    knots = make_knot_vector(BasisSpec(num_basis=3, degree=1)).knots

    np.testing.assert_array_equal(knots, [0, 0, 0.5, 1, 1])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"num_basis": 3, "degree": 3},
        {"num_basis": 5, "degree": -1},
        {"num_basis": 5, "domain_lo": 1.0, "domain_hi": 1.0},
    ],
)
def test_basis_spec_rejects_invalid_settings(kwargs):
    with pytest.raises(ConfigurationError):
        BasisSpec(**kwargs)


def test_eval_basis_degree_zero_is_an_indicator():
    values = eval_basis(BasisSpec(num_basis=2, degree=0), [0.25]).values

    np.testing.assert_array_equal(values, [[1.0, 0.0]])


def test_eval_basis_matches_bernstein_cubics_without_interior_knots():
    xs = np.linspace(0.0, 1.0, 41)
    values = eval_basis(BasisSpec(num_basis=4, degree=3), xs).values

    bernstein = np.column_stack([comb(3, k) * xs**k * (1 - xs) ** (3 - k) for k in range(4)])
    np.testing.assert_allclose(values, bernstein, atol=1e-12)
    np.testing.assert_allclose(values[20], [0.125, 0.375, 0.375, 0.125], atol=1e-12)


@pytest.mark.parametrize("degree,num_basis", [(1, 3), (2, 7), (3, 8), (3, 18), (4, 11)])
def test_eval_basis_is_a_partition_of_unity(rng, degree, num_basis):
    xs = rng.uniform(size=1000)
    values = eval_basis(BasisSpec(num_basis=num_basis, degree=degree), xs).values

    assert values.min() >= 0.0
    assert np.max(np.abs(values.sum(axis=1) - 1.0)) < 1e-12


def test_eval_basis_matches_scipy_bspline(rng):
    spec = BasisSpec(num_basis=9, degree=3)
    knots = make_knot_vector(spec).knots
    xs = rng.uniform(size=200)

    expected = BSpline.design_matrix(xs, knots, spec.degree).toarray()

    np.testing.assert_allclose(eval_basis(spec, xs).values, expected, atol=1e-12)


def test_eval_basis_assigns_right_endpoint_to_last_span():
    values = eval_basis(BasisSpec(num_basis=6, degree=3), [1.0]).values

    np.testing.assert_allclose(values, [[0, 0, 0, 0, 0, 1.0]], atol=1e-15)


def test_eval_basis_columns_have_local_support():
    spec = BasisSpec(num_basis=10, degree=3)
    knots = make_knot_vector(spec).knots
    xs = np.linspace(0.0, 1.0, 2001)
    values = eval_basis(spec, xs).values

    for column in range(spec.num_basis):
        support = xs[values[:, column] > 0]
        assert support.min() >= knots[column]
        assert support.max() <= knots[column + spec.degree + 1]


def test_eval_basis_rejects_points_outside_domain():
    with pytest.raises(DomainError):
        eval_basis(BasisSpec(num_basis=5), [0.5, 1.2])


def test_second_difference_matrix_smallest_case():
    np.testing.assert_array_equal(second_difference_matrix(3), [[1.0, -2.0, 1.0]])


def test_second_difference_matrix_of_squares():
    beta = np.array([0.0, 1.0, 4.0, 9.0, 16.0])

    np.testing.assert_array_equal(second_difference_matrix(5) @ beta, [2.0, 2.0, 2.0])


@pytest.mark.parametrize("p", range(3, 41))
def test_second_difference_matrix_annihilates_affine_sequences(p):
    j = np.arange(p, dtype=float)

    assert np.all(second_difference_matrix(p) @ (3.0 - 2.0 * j) == 0.0)


def test_second_difference_matrix_rejects_short_vectors():
    with pytest.raises(ConfigurationError):
        second_difference_matrix(2)


def test_covariate_basis_drop_first_removes_leading_column(rng):
    x = np.concatenate([[0.0, 1.0], rng.uniform(size=20)])

    dropped = covariate_basis(x, 5, convention=BasisConvention.DROP_FIRST)

    assert dropped.num_basis == 5
    np.testing.assert_array_equal(dropped.values, eval_basis(BasisSpec(num_basis=6), x).values[:, 1:])
    np.testing.assert_allclose(dropped.values[0], 0.0)
    assert not np.allclose(dropped.values.sum(axis=1), 1.0)


def test_covariate_basis_clamped_keeps_every_column(rng):
    x = rng.uniform(size=20)

    clamped = covariate_basis(x, 5)

    np.testing.assert_array_equal(clamped.values, eval_basis(BasisSpec(num_basis=5), x).values)
