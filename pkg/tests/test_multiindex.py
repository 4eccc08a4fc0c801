from math import comb, factorial, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ppachaos.multiindex import (
    basis_gradient_row,
    basis_row,
    basis_size,
    embed_coefficients,
    enumerate_basis,
    hermite_derivative,
    hermite_value,
)
from ppachaos.pce import tensor_rule


@pytest.mark.parametrize("d,p,count", [(7, 3, 120), (4, 3, 35), (3, 0, 1)])
def test_counts(d, p, count):
    assert len(enumerate_basis(d, p)) == count


def test_zero_degree_is_constant():
    basis = enumerate_basis(3, 0)
    assert basis.indices.tolist() == [[0, 0, 0]]


@pytest.mark.parametrize("d", range(1, 9))
@pytest.mark.parametrize("p", range(0, 6))
def test_count_closed_form(d, p):
    basis = enumerate_basis(d, p)
    assert len(basis) == comb(d + p, p) == basis_size(d, p)
    assert np.all(basis.degrees <= p)
    assert np.all(np.diff(basis.degrees) >= 0)
    assert basis.indices[0].sum() == 0


def test_graded_order_within_degree():
    basis = enumerate_basis(2, 2)
    assert basis.indices.tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
    assert basis.first_order_positions().tolist() == [1, 2]


def test_deterministic_enumeration():
    a, b = enumerate_basis(5, 4), enumerate_basis(5, 4)
    assert a == b and a.indices.tobytes() == b.indices.tobytes()


@pytest.mark.parametrize("d,p", [(0, 2), (-1, 1), (2, -1)])
def test_rejects_invalid(d, p):
    with pytest.raises(ValueError):
        enumerate_basis(d, p)


@pytest.mark.parametrize("n,x,expected", [(0, 1.7, 1.0), (1, 1.7, 1.7), (2, 2.0, 3.0)])
def test_hermite_value(n, x, expected):
    assert hermite_value(n, x) == pytest.approx(expected)


@pytest.mark.parametrize("n,x,expected", [(0, 5.0, 0.0), (2, 2.0, 4.0), (3, 1.0, 0.0)])
def test_hermite_derivative(n, x, expected):
    assert hermite_derivative(n, x) == pytest.approx(expected, abs=1e-14)


def test_hermite_matches_numpy():
    from numpy.polynomial.hermite_e import hermeval

    x = np.linspace(-3, 3, 13)
    for n in range(7):
        c = np.zeros(n + 1)
        c[n] = 1
        assert np.allclose(hermite_value(n, x), hermeval(x, c), rtol=1e-13, atol=1e-12)


def test_basis_row_examples():
    assert np.allclose(basis_row(enumerate_basis(1, 2), [0.0]), [1, 0, -1 / sqrt(2)])
    assert np.allclose(basis_row(enumerate_basis(2, 1), [0.3, -0.7]), [1, 0.3, -0.7])
    b = enumerate_basis(2, 2)
    assert basis_row(b, [1.0, 1.0])[b.position([1, 1])] == pytest.approx(1.0)


def test_basis_gradient_examples():
    g = basis_gradient_row(enumerate_basis(1, 2), [2.0], 0)
    assert np.allclose(g, [0, 1, 4 / sqrt(2)])
    b = enumerate_basis(3, 3)
    assert basis_gradient_row(b, [0.1, 0.2, 0.3], 2)[0] == 0.0


def test_gradient_fd_at_example_point():
    b = enumerate_basis(2, 4)
    x = np.array([0.3, -1.2])
    h = 1e-6
    for k in range(2):
        e = np.eye(2)[k] * h
        fd = (basis_row(b, x + e) - basis_row(b, x - e)) / (2 * h)
        g = basis_gradient_row(b, x, k)
        assert np.max(np.abs(fd - g) / np.maximum(np.abs(g), 1)) < 1e-6


def test_dimension_errors():
    b = enumerate_basis(2, 2)
    with pytest.raises(ValueError):
        basis_row(b, [1.0, 2.0, 3.0])
    with pytest.raises(IndexError):
        basis_gradient_row(b, [1.0, 2.0], 2)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("p", range(5))
def test_orthonormality_quadrature(d, p):
    b = enumerate_basis(d, p)
    pts, w = tensor_rule(d, p + 1)
    psi = np.array([basis_row(b, x) for x in pts])
    assert np.max(np.abs(psi.T @ (w[:, None] * psi) - np.eye(len(b)))) < 1e-10


def test_normalization_factor():
    b = enumerate_basis(1, 4)
    x = 0.37
    for k in range(5):
        assert basis_row(b, [x])[k] == pytest.approx(hermite_value(k, x) / sqrt(factorial(k)))


def test_embed_coefficients_pads():
    small, big = enumerate_basis(2, 2), enumerate_basis(3, 2)
    coef = np.arange(len(small), dtype=float) + 1
    out = embed_coefficients(small, coef, big)
    x = np.array([[0.2, -0.4, 1.3], [1.0, 0.5, -2.0]])
    from ppachaos.multiindex import design_matrix

    assert np.allclose(design_matrix(big, x) @ out, design_matrix(small, x[:, :2]) @ coef)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 3),
    st.integers(1, 4),
    st.lists(st.floats(-3, 3), min_size=3, max_size=3),
)
def test_gradient_matches_fd_property(d, p, xs):
    b = enumerate_basis(d, p)
    x = np.array(xs[:d])
    h = 1e-6
    for k in range(d):
        e = np.eye(d)[k] * h
        fd = (basis_row(b, x + e) - basis_row(b, x - e)) / (2 * h)
        g = basis_gradient_row(b, x, k)
        assert np.max(np.abs(fd - g) / np.maximum(np.abs(g), 1)) < 1e-6
