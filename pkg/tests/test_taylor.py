"""Second-order jet arithmetic against closed-form and finite-difference oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckemlab.taylor import Jet2


def _expr(x, y):
    # generic smooth test expression exercising every supported operation
    return (x * y + 2.0) ** 3 / (x + y + 3.0) + (x + 1.5).sqrt() * (y + 2.0).log()


def _expr_plain(x, y):
    return (x * y + 2.0) ** 3 / (x + y + 3.0) + np.sqrt(x + 1.5) * np.log(y + 2.0)


def _fd_grad_hess(f, pt, h=1e-5):
    e = np.eye(2) * h
    g = np.array([(f(*(pt + e[i])) - f(*(pt - e[i]))) / (2 * h) for i in range(2)])
    H = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            H[i, j] = (f(*(pt + e[i] + e[j])) - f(*(pt + e[i] - e[j]))
                       - f(*(pt - e[i] + e[j])) + f(*(pt - e[i] - e[j]))) / (4 * h * h)
    return g, H


def test_coordinate_jets_are_exact():
    pts = np.array([[0.3, 0.7], [1.2, -0.4]])
    xj, yj = Jet2.coordinates(pts)
    assert np.array_equal(xj.value, pts[:, 0])
    assert np.array_equal(yj.value, pts[:, 1])
    assert np.array_equal(xj.grad, np.tile([1.0, 0.0], (2, 1)))
    assert np.array_equal(yj.grad, np.tile([0.0, 1.0], (2, 1)))
    assert np.all(xj.hess == 0.0) and np.all(yj.hess == 0.0)


def test_polynomial_jet_matches_calculus():
    pts = np.array([[0.4, 0.9]])
    xj, yj = Jet2.coordinates(pts)
    f = xj ** 2 * yj + xj * 3.0 - yj ** 3
    x, y = pts[0]
    assert f.value[0] == pytest.approx(x * x * y + 3 * x - y**3, rel=1e-14)
    assert f.grad[0] == pytest.approx([2 * x * y + 3.0, x * x - 3 * y * y], rel=1e-14)
    np.testing.assert_allclose(f.hess[0], [[2 * y, 2 * x], [2 * x, -6 * y]], rtol=1e-14)


def test_generic_expression_against_finite_differences():
    pts = np.array([[0.25, 0.6], [1.3, 0.1], [0.05, 1.8]])
    xj, yj = Jet2.coordinates(pts)
    f = _expr(xj, yj)
    np.testing.assert_allclose(f.value, _expr_plain(pts[:, 0], pts[:, 1]), rtol=1e-13)
    for k, pt in enumerate(pts):
        g, H = _fd_grad_hess(_expr_plain, pt)
        np.testing.assert_allclose(f.grad[k], g, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(f.hess[k], H, rtol=1e-4, atol=1e-5)


def test_division_and_reciprocal_consistency():
    pts = np.array([[0.5, 0.25]])
    xj, yj = Jet2.coordinates(pts)
    left = xj / (yj + 1.0)
    right = xj * (1.0 / (yj + 1.0))
    np.testing.assert_allclose(left.value, right.value, rtol=1e-14)
    np.testing.assert_allclose(left.grad, right.grad, rtol=1e-14)
    np.testing.assert_allclose(left.hess, right.hess, rtol=1e-13)


def test_pow_matches_repeated_product():
    pts = np.array([[1.1, 0.3]])
    xj, _ = Jet2.coordinates(pts)
    cube = xj ** 3
    prod = xj * xj * xj
    np.testing.assert_allclose(cube.value, prod.value, rtol=1e-14)
    np.testing.assert_allclose(cube.hess, prod.hess, rtol=1e-13)


def test_log_of_product_is_sum_of_logs():
    pts = np.array([[0.7, 0.4]])
    xj, yj = Jet2.coordinates(pts)
    lhs = (xj * yj).log()
    rhs = xj.log() + yj.log()
    np.testing.assert_allclose(lhs.value, rhs.value, rtol=1e-13)
    np.testing.assert_allclose(lhs.grad, rhs.grad, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(lhs.hess, rhs.hess, rtol=1e-11, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.05, 3.0), y=st.floats(0.05, 3.0))
def test_hessian_is_symmetric(x, y):
    pts = np.array([[x, y]])
    xj, yj = Jet2.coordinates(pts)
    f = _expr(xj, yj)
    scale = max(1.0, float(np.max(np.abs(f.hess[0]))))
    # product-rule terms associate differently across the diagonal, so exact
    # equality is not an invariant; near machine precision is
    assert abs(f.hess[0, 0, 1] - f.hess[0, 1, 0]) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-2.0, 2.0), y=st.floats(-2.0, 2.0),
       s=st.floats(-3.0, 3.0))
def test_linearity_of_jet_addition(x, y, s):
    pts = np.array([[x, y]])
    xj, yj = Jet2.coordinates(pts)
    f = xj * xj - yj
    g = xj * yj + 1.0
    combo = f + g * s
    assert combo.value[0] == pytest.approx(f.value[0] + s * g.value[0], rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(combo.hess[0], f.hess[0] + s * g.hess[0], rtol=1e-12, atol=1e-12)
