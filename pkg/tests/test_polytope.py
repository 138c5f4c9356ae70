"""Moment polygons, quadrature exactness, and the affine-function helpers."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckemlab.errors import InteriorDomainError, ParameterDomainError
from ckemlab.polytope import (AffineHamiltonian, QuadratureRule, affine_min,
                              integrate, lattice_perimeter,
                              make_blowup_polytope, polygon_quadrature,
                              polytope_from_json, polytope_to_json,
                              random_interior_points, standard_simplex)


def _monomial_integral_simplex(i: int, j: int) -> float:
    # int over {x,y>=0, x+y<=1} of x^i y^j = i! j! / (i+j+2)!
    return math.factorial(i) * math.factorial(j) / math.factorial(i + j + 2)


def test_simplex_geometry():
    P = standard_simplex()
    assert P.area == pytest.approx(0.5, rel=1e-14)
    assert lattice_perimeter(P) == pytest.approx(3.0, rel=1e-14)
    verts = sorted(map(tuple, P.vertices))
    assert verts == pytest.approx([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)])


def test_blowup_geometry():
    p = 0.5
    P = make_blowup_polytope(p)
    verts = sorted(map(tuple, np.round(P.vertices, 12)))
    assert verts == pytest.approx([(0.0, 0.0), (0.0, 1.0), (0.5, 0.0), (0.5, 0.5)])
    assert P.area == pytest.approx(0.5 * p * (2.0 - p), rel=1e-14)
    assert lattice_perimeter(P) == pytest.approx(2.0 + p, rel=1e-14)


@pytest.mark.parametrize("p", [-0.1, 0.0, 1.0, 1.5])
def test_blowup_rejects_bad_parameter(p):
    with pytest.raises(ParameterDomainError):
        make_blowup_polytope(p)


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.01, 0.99))
def test_blowup_area_and_perimeter_formulas(p):
    P = make_blowup_polytope(p)
    assert P.area == pytest.approx(0.5 * p * (2.0 - p), rel=1e-12)
    assert lattice_perimeter(P) == pytest.approx(2.0 + p, rel=1e-12)


def test_quadrature_weights_and_nodes():
    P = make_blowup_polytope(0.7)
    quad = polygon_quadrature(P, QuadratureRule(2, 6))
    assert np.all(quad.weights > 0.0)
    assert float(np.sum(quad.weights)) == pytest.approx(P.area, rel=1e-13)
    assert np.all(P.contains_interior(quad.nodes))


def test_quadrature_integrates_polynomials_exactly():
    P = standard_simplex()
    rule = QuadratureRule(1, 8)
    for i, j in [(0, 0), (1, 0), (0, 2), (2, 3), (4, 1), (3, 3)]:
        got = integrate(P, lambda pts: pts[:, 0] ** i * pts[:, 1] ** j, rule)
        assert got == pytest.approx(_monomial_integral_simplex(i, j), rel=1e-12)


def test_integrate_accepts_constants():
    P = standard_simplex()
    assert integrate(P, 3.0) == pytest.approx(1.5, rel=1e-13)


def test_refined_rule_increments_depth():
    rule = QuadratureRule(2, 6)
    finer = rule.refined(1)
    assert finer.subdivision_depth == 3
    assert finer.gauss_order == 6


def test_require_interior_raises_on_boundary():
    P = standard_simplex()
    with pytest.raises(InteriorDomainError):
        P.require_interior(np.array([[0.0, 0.5]]))
    with pytest.raises(InteriorDomainError):
        P.require_interior(np.array([[0.6, 0.6]]))


def test_affine_hamiltonian_and_min():
    P = make_blowup_polytope(0.5)
    f = AffineHamiltonian(-0.2, 0.1, 0.3)
    vals = f(P.vertices)
    assert affine_min(f, P) == pytest.approx(float(np.min(vals)), rel=1e-15)
    pt = np.array([0.2, 0.3])
    assert f(pt) == pytest.approx(-0.2 * 0.2 + 0.1 * 0.3 + 0.3, rel=1e-14)


def test_random_interior_points_stay_inside():
    P = make_blowup_polytope(0.3)
    pts = random_interior_points(P, 200, np.random.default_rng(1))
    assert pts.shape == (200, 2)
    assert np.all(P.contains_interior(pts))


def test_polytope_json_round_trip():
    P = make_blowup_polytope(0.25)
    data = polytope_to_json(P)
    Q = polytope_from_json(json.dumps(data))
    assert Q == P
    np.testing.assert_allclose(Q.vertices, P.vertices, rtol=0, atol=0)


def test_support_jets_match_affine_data():
    P = standard_simplex()
    pts = np.array([[0.2, 0.3], [0.1, 0.6]])
    jets = P.support_jets(pts)
    for facet, jet in zip(P.facets, jets):
        np.testing.assert_allclose(jet.value, facet.support(pts), rtol=1e-15)
        np.testing.assert_allclose(jet.grad, np.tile(facet.normal, (2, 1)),
                                   rtol=0, atol=0)
        assert np.all(jet.hess == 0.0)
