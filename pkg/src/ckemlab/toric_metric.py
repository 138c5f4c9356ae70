"""Torus-invariant Kahler metrics on a Delzant polygon.

The symplectic potential is the Guillemin potential u = (1/2) sum l_k log l_k,
whose Hessian H(x) = (1/2) sum n_k n_k^T / l_k(x) is available in closed form.
Writing U = H^{-1} for the inverse Hessian, the module evaluates

    scalar curvature   S(x)      = - sum_ij  d^2 U^ij / dx_i dx_j,
    metric Laplacian   Delta phi = - sum_ij  d_i ( U^ij  d_j phi ),

with every derivative computed exactly by second-order Taylor (jet)
arithmetic through the rational expression adj(H)/det(H).  The sign and
factor conventions are pinned by two calibrations exercised in the tests:
the interval reduction gives curvature -Psi'' for a profile Psi, and the
integral of S over the polygon equals twice its lattice perimeter.  The
Laplacian has nonnegative spectrum (d*d convention).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, ParameterDomainError
from .polytope import MomentPolytope, QuadratureRule, polygon_quadrature
from .taylor import Jet2

_POTENTIAL_KINDS = ("guillemin",)
_DIFF_ENGINES = ("taylor2",)


@dataclass(frozen=True)
class ToricMetricModel:
    """A concrete toric Kahler metric determined by a symplectic potential."""

    polytope: MomentPolytope
    potential_kind: str = "guillemin"
    differentiation: str = "taylor2"

    def __post_init__(self) -> None:
        if self.potential_kind not in _POTENTIAL_KINDS:
            raise ParameterDomainError(f"unknown potential kind {self.potential_kind!r}")
        if self.differentiation not in _DIFF_ENGINES:
            raise ParameterDomainError(f"unknown derivative engine {self.differentiation!r}")


def _as_batch(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def guillemin_potential(model: ToricMetricModel, x):
    """(1/2) sum l_k log l_k at interior points; scalar in, scalar out."""
    pts, single = _as_batch(x)
    model.polytope.require_interior(pts)
    vals = model.polytope.support_values(pts)
    pot = 0.5 * np.sum(vals * np.log(vals), axis=1)
    return float(pot[0]) if single else pot


def metric_hessian(model: ToricMetricModel, x):
    """Closed-form H(x) = (1/2) sum n_k n_k^T / l_k(x); shape (2,2) or (n,2,2)."""
    pts, single = _as_batch(x)
    model.polytope.require_interior(pts)
    vals = model.polytope.support_values(pts)
    normals = np.array([f.normal for f in model.polytope.facets], dtype=float)
    outer = np.einsum("ki,kj->kij", normals, normals)
    H = 0.5 * np.einsum("nk,kij->nij", 1.0 / vals, outer)
    return H[0] if single else H


def inverse_hessian(model: ToricMetricModel, x):
    """U(x) = H(x)^{-1} via the 2x2 adjugate; shape (2,2) or (n,2,2)."""
    pts, single = _as_batch(x)
    H = np.atleast_3d(metric_hessian(model, pts)).reshape(-1, 2, 2)
    det = H[:, 0, 0] * H[:, 1, 1] - H[:, 0, 1] ** 2
    if np.any(det <= 0) or np.any(H[:, 0, 0] <= 0):
        raise DegeneracyError("metric Hessian lost positive definiteness")
    U = np.empty_like(H)
    U[:, 0, 0] = H[:, 1, 1] / det
    U[:, 1, 1] = H[:, 0, 0] / det
    U[:, 0, 1] = U[:, 1, 0] = -H[:, 0, 1] / det
    return U[0] if single else U


def _inverse_hessian_jets(model: ToricMetricModel, pts: np.ndarray) -> tuple[Jet2, Jet2, Jet2]:
    """Jets of U^11, U^12, U^22 at interior points (exact second derivatives).

    Written as U = 2 adj(W) / D after clearing the facet denominators, with
    W = prod_k l_k * H.  Every intermediate is a polynomial in the support
    values, so nothing blows up as a node approaches the boundary; the naive
    adj(H)/det(H) route loses ~eps/dist^2 to cancellation there.
    """
    model.polytope.require_interior(pts)
    l_jets = model.polytope.support_jets(pts)
    facets = model.polytope.facets
    count = len(facets)
    n = pts.shape[0]

    def product_excluding(skip: set) -> Jet2:
        prod = None
        for m in range(count):
            if m in skip:
                continue
            prod = l_jets[m] if prod is None else prod * l_jets[m]
        return prod if prod is not None else Jet2.constant(1.0, n)

    N11 = Jet2.constant(0.0, n)
    N12 = Jet2.constant(0.0, n)
    N22 = Jet2.constant(0.0, n)
    for k, facet in enumerate(facets):
        n1, n2 = facet.normal
        t1, t2 = -float(n2), float(n1)
        pk = product_excluding({k})
        N11 = N11 + pk * (t1 * t1)
        N12 = N12 + pk * (t1 * t2)
        N22 = N22 + pk * (t2 * t2)
    D = Jet2.constant(0.0, n)
    for j in range(count):
        nj = facets[j].normal
        for k in range(j + 1, count):
            nk = facets[k].normal
            cross = float(nj[0] * nk[1] - nj[1] * nk[0])
            if cross != 0.0:
                D = D + product_excluding({j, k}) * (cross * cross)
    if np.any(D.value <= 0) or np.any(N11.value + N22.value <= 0):
        raise DegeneracyError("metric Hessian lost positive definiteness")
    inv_D = 1.0 / D
    return (N11 * 2.0) * inv_D, (N12 * 2.0) * inv_D, (N22 * 2.0) * inv_D


def abreu_scalar_curvature(model: ToricMetricModel, x):
    """S(x) = -(U^11_{,11} + 2 U^12_{,12} + U^22_{,22}); scalar or batch."""
    pts, single = _as_batch(x)
    U11, U12, U22 = _inverse_hessian_jets(model, pts)
    S = -(U11.hess[:, 0, 0] + 2.0 * U12.hess[:, 0, 1] + U22.hess[:, 1, 1])
    return float(S[0]) if single else S


def scalar_curvature_field(model: ToricMetricModel):
    """Batch evaluator of the scalar curvature, suitable for `integrate`."""
    def field(points: np.ndarray) -> np.ndarray:
        return abreu_scalar_curvature(model, np.atleast_2d(points))
    return field


def toric_laplacian(model: ToricMetricModel, phi, x):
    """Delta phi = -sum_ij d_i(U^ij d_j phi) at x, derivatives exact.

    `phi` must map a pair of coordinate jets to a jet, e.g.
    ``lambda mu1, mu2: mu1 ** 2 + mu1 * mu2`` or `AffineHamiltonian.as_jet`
    composed suitably.
    """
    pts, single = _as_batch(x)
    U11, U12, U22 = _inverse_hessian_jets(model, pts)
    xj, yj = Jet2.coordinates(pts)
    pj = phi(xj, yj)
    if not isinstance(pj, Jet2):
        pj = Jet2.constant(float(pj), pts.shape[0])
    div1 = U11.grad[:, 0] + U12.grad[:, 1]
    div2 = U12.grad[:, 0] + U22.grad[:, 1]
    lap = -(div1 * pj.grad[:, 0] + div2 * pj.grad[:, 1]
            + U11.value * pj.hess[:, 0, 0]
            + 2.0 * U12.value * pj.hess[:, 0, 1]
            + U22.value * pj.hess[:, 1, 1])
    return float(lap[0]) if single else lap


@dataclass(frozen=True)
class WeightedGeometryData:
    """Per-node metric data cached for fast sweeps over Killing potentials.

    For an affine f with slope s the conformal scalar curvature only needs
    S_J, U s, and div(U) s at every node, so a single jet pass serves every
    (slope, offset) candidate afterwards.
    """

    nodes: np.ndarray       # (n, 2)
    weights: np.ndarray     # (n,)
    scalar: np.ndarray      # (n,)   S_J
    inv_hessian: np.ndarray  # (n, 2, 2)
    div_inv_hessian: np.ndarray  # (n, 2), entry j = sum_i d_i U^ij


def node_weighted_geometry(model: ToricMetricModel, rule: QuadratureRule) -> WeightedGeometryData:
    quad = polygon_quadrature(model.polytope, rule)
    U11, U12, U22 = _inverse_hessian_jets(model, quad.nodes)
    S = -(U11.hess[:, 0, 0] + 2.0 * U12.hess[:, 0, 1] + U22.hess[:, 1, 1])
    n = quad.nodes.shape[0]
    U = np.empty((n, 2, 2))
    U[:, 0, 0] = U11.value
    U[:, 0, 1] = U[:, 1, 0] = U12.value
    U[:, 1, 1] = U22.value
    divU = np.stack([U11.grad[:, 0] + U12.grad[:, 1],
                     U12.grad[:, 0] + U22.grad[:, 1]], axis=1)
    return WeightedGeometryData(nodes=quad.nodes, weights=quad.weights, scalar=S,
                                inv_hessian=U, div_inv_hessian=divU)


def sample_field_csv(model: ToricMetricModel, path, rule: QuadratureRule = QuadratureRule(1, 4),
                     which: str = "scalar_curvature") -> None:
    """Write (x1, x2, value) samples of a named field at quadrature nodes."""
    fields = {
        "scalar_curvature": lambda pts: abreu_scalar_curvature(model, pts),
        "potential": lambda pts: guillemin_potential(model, pts),
    }
    if which not in fields:
        raise ParameterDomainError(f"unknown field {which!r}; choose from {sorted(fields)}")
    nodes = polygon_quadrature(model.polytope, rule).nodes
    values = fields[which](nodes)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "value"])
        for (x1, x2), v in zip(nodes, values):
            writer.writerow([repr(float(x1)), repr(float(x2)), repr(float(v))])
