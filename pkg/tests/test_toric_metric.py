"""Metric data from the canonical potential: curvature calibrations and jets."""

import numpy as np
import pytest

from ckemlab.errors import InteriorDomainError
from ckemlab.polytope import (Facet, MomentPolytope, QuadratureRule, integrate,
                              lattice_perimeter, make_blowup_polytope,
                              polygon_quadrature, random_interior_points,
                              standard_simplex)
from ckemlab.toric_metric import (ToricMetricModel, abreu_scalar_curvature,
                                  guillemin_potential, inverse_hessian,
                                  metric_hessian, node_weighted_geometry,
                                  sample_field_csv, scalar_curvature_field,
                                  toric_laplacian)


def _rectangle(a1, b1, a2, b2) -> MomentPolytope:
    return MomentPolytope([
        Facet((1, 0), -a1), Facet((-1, 0), b1),
        Facet((0, 1), -a2), Facet((0, -1), b2),
    ])


def test_simplex_curvature_is_constant_twelve():
    model = ToricMetricModel(standard_simplex())
    pts = random_interior_points(model.polytope, 300, np.random.default_rng(2))
    S = abreu_scalar_curvature(model, pts)
    np.testing.assert_allclose(S, 12.0, rtol=0, atol=1e-8)


def test_simplex_curvature_stable_near_boundary():
    model = ToricMetricModel(standard_simplex())
    probes = np.array([[1e-9, 0.5], [0.5, 1e-10], [0.3, 0.7 - 1e-9],
                       [1e-7, 1e-7]])
    S = abreu_scalar_curvature(model, probes)
    np.testing.assert_allclose(S, 12.0, rtol=0, atol=1e-7)


def test_rectangle_reduces_to_interval_profiles():
    # product polygon: curvature is the sum of the 1D contributions 4/(b-a)
    model = ToricMetricModel(_rectangle(1.0, 2.0, 0.0, 1.0))
    pts = random_interior_points(model.polytope, 200, np.random.default_rng(3))
    S = abreu_scalar_curvature(model, pts)
    np.testing.assert_allclose(S, 4.0 / 1.0 + 4.0 / 1.0, rtol=0, atol=1e-8)

    wide = ToricMetricModel(_rectangle(0.0, 4.0, 1.0, 2.5))
    pts = random_interior_points(wide.polytope, 200, np.random.default_rng(4))
    np.testing.assert_allclose(abreu_scalar_curvature(wide, pts),
                               4.0 / 4.0 + 4.0 / 1.5, rtol=0, atol=1e-8)


@pytest.mark.parametrize("make,target", [
    (standard_simplex, 3.0),
    (lambda: make_blowup_polytope(0.2), 2.2),
    (lambda: make_blowup_polytope(0.5), 2.5),
    (lambda: make_blowup_polytope(0.8), 2.8),
    (lambda: make_blowup_polytope(0.95), 2.95),
])
def test_total_curvature_equals_twice_lattice_perimeter(make, target):
    P = make()
    assert lattice_perimeter(P) == pytest.approx(target, rel=1e-13)
    total = integrate(P, scalar_curvature_field(ToricMetricModel(P)),
                      QuadratureRule())
    assert total == pytest.approx(2.0 * target, rel=1e-7)


def test_metric_hessian_positive_definite_and_inverse():
    model = ToricMetricModel(make_blowup_polytope(0.6))
    pts = random_interior_points(model.polytope, 50, np.random.default_rng(5))
    H = metric_hessian(model, pts)
    U = inverse_hessian(model, pts)
    eig = np.linalg.eigvalsh(H)
    assert np.all(eig > 0.0)
    prod = np.einsum("nij,njk->nik", H, U)
    np.testing.assert_allclose(prod, np.tile(np.eye(2), (50, 1, 1)),
                               rtol=0, atol=1e-11)


def test_inverse_hessian_closed_form_on_simplex():
    model = ToricMetricModel(standard_simplex())
    pts = random_interior_points(model.polytope, 60, np.random.default_rng(6))
    U = inverse_hessian(model, pts)
    x, y = pts[:, 0], pts[:, 1]
    np.testing.assert_allclose(U[:, 0, 0], 2 * x * (1 - x), rtol=1e-12)
    np.testing.assert_allclose(U[:, 0, 1], -2 * x * y, rtol=1e-12)
    np.testing.assert_allclose(U[:, 1, 1], 2 * y * (1 - y), rtol=1e-12)


def test_laplacian_against_closed_form_divergence():
    # phi = x^2 + x y on the simplex; U is quadratic, so the divergence is exact:
    # Delta phi = -(d1(U11 p1 + U12 p2) + d2(U12 p1 + U22 p2))
    model = ToricMetricModel(standard_simplex())
    pts = random_interior_points(model.polytope, 40, np.random.default_rng(7))
    x, y = pts[:, 0], pts[:, 1]
    got = toric_laplacian(model, lambda u, v: u * u + u * v, pts)

    h = 1e-6

    def flux(pt):
        xx, yy = pt
        U = inverse_hessian(model, np.array([xx, yy]))
        p = np.array([2 * xx + yy, xx])
        return U @ p

    want = np.empty_like(got)
    for k, pt in enumerate(pts):
        d1 = (flux(pt + [h, 0])[0] - flux(pt - [h, 0])[0]) / (2 * h)
        d2 = (flux(pt + [0, h])[1] - flux(pt - [0, h])[1]) / (2 * h)
        want[k] = -(d1 + d2)
    np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7)


def test_laplacian_of_constant_vanishes():
    model = ToricMetricModel(make_blowup_polytope(0.4))
    pts = random_interior_points(model.polytope, 20, np.random.default_rng(8))
    lap = toric_laplacian(model, lambda u, v: u * 0.0 + 7.0, pts)
    np.testing.assert_allclose(lap, 0.0, rtol=0, atol=1e-13)


def test_laplacian_nonnegative_spectrum_convention():
    # int phi * Delta phi dmu >= 0 for phi vanishing-ish test functions
    P = standard_simplex()
    model = ToricMetricModel(P)
    phi = lambda u, v: u * v * (u * (-1.0) + (v * (-1.0) + 1.0))
    val = integrate(P, lambda pts: np.asarray(
        phi(pts[:, 0], pts[:, 1]) * toric_laplacian(model, phi, pts)),
        QuadratureRule(2, 8))
    assert val > 0.0


def test_guillemin_potential_values_and_domain():
    model = ToricMetricModel(standard_simplex())
    val = guillemin_potential(model, np.array([0.25, 0.25]))
    want = 0.5 * (2 * 0.25 * np.log(0.25) + 0.5 * np.log(0.5))
    assert val == pytest.approx(want, rel=1e-13)
    with pytest.raises(InteriorDomainError):
        guillemin_potential(model, np.array([0.0, 0.25]))
    with pytest.raises(InteriorDomainError):
        abreu_scalar_curvature(model, np.array([[0.5, 0.5]]))


def test_node_geometry_consistent_with_direct_evaluation():
    model = ToricMetricModel(make_blowup_polytope(0.5))
    rule = QuadratureRule(1, 4)
    geo = node_weighted_geometry(model, rule)
    quad = polygon_quadrature(model.polytope, rule)
    np.testing.assert_allclose(geo.nodes, quad.nodes, rtol=0, atol=0)
    np.testing.assert_allclose(geo.weights, quad.weights, rtol=0, atol=0)
    np.testing.assert_allclose(geo.scalar,
                               abreu_scalar_curvature(model, geo.nodes),
                               rtol=1e-13)
    np.testing.assert_allclose(geo.inv_hessian,
                               inverse_hessian(model, geo.nodes),
                               rtol=1e-11, atol=1e-13)
    # divergence columns against finite differences of the closed-form inverse
    h = 1e-6
    for k in [0, len(geo.nodes) // 2]:
        pt = geo.nodes[k]
        dU = np.empty((2, 2, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            dU[i] = (inverse_hessian(model, pt + e)
                     - inverse_hessian(model, pt - e)) / (2 * h)
        want = np.array([dU[0, 0, 0] + dU[1, 0, 1], dU[0, 1, 0] + dU[1, 1, 1]])
        np.testing.assert_allclose(geo.div_inv_hessian[k], want,
                                   rtol=1e-5, atol=1e-6)


def test_sample_field_csv(tmp_path):
    model = ToricMetricModel(standard_simplex())
    path = tmp_path / "field.csv"
    sample_field_csv(model, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,value"
    assert len(lines) > 10
    first = [float(tok) for tok in lines[1].split(",")]
    assert first[2] == pytest.approx(12.0, abs=1e-8)
