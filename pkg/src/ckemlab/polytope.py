"""Delzant moment polygons, affine Hamiltonians, and interior quadrature.

The polygon is stored facet-first: inequalities l_k(x) = <n_k, x> + lambda_k >= 0
with primitive integer normals.  Vertices are derived from the facets and
cached; the Delzant condition (adjacent primitive normals with determinant
+-1) is validated on construction.

Quadrature is a fan triangulation from an interior point, dyadic subdivision
of every triangle (which refines toward the edges where weighted integrands
steepen), and a conical-product Gauss rule per triangle.  Nodes are strictly
interior by construction and weights are positive and sum to the exact area.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import InteriorDomainError, NodeEvaluationError, ParameterDomainError
from .taylor import Jet2

_GEOM_TOL = 1e-9


@dataclass(frozen=True)
class Facet:
    """One inequality l(x) = <normal, x> + offset >= 0 with a primitive integer normal."""

    normal: tuple[int, int]
    offset: float

    def __post_init__(self) -> None:
        n1, n2 = self.normal
        if n1 != int(n1) or n2 != int(n2):
            raise ParameterDomainError(f"facet normal must be integer, got {self.normal}")
        if math.gcd(abs(int(n1)), abs(int(n2))) != 1:
            raise ParameterDomainError(f"facet normal must be primitive, got {self.normal}")
        object.__setattr__(self, "normal", (int(n1), int(n2)))
        object.__setattr__(self, "offset", float(self.offset))

    def support(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ np.asarray(self.normal, dtype=float) + self.offset


@dataclass(frozen=True)
class AffineHamiltonian:
    """Affine function a*mu_1 + b*mu_2 + c on the moment plane."""

    slope_1: float
    slope_2: float
    offset: float

    @property
    def slope(self) -> np.ndarray:
        return np.array([self.slope_1, self.slope_2], dtype=float)

    def __call__(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        return x @ self.slope + self.offset

    def as_jet(self, points: np.ndarray) -> Jet2:
        xj, yj = Jet2.coordinates(points)
        return xj * self.slope_1 + yj * self.slope_2 + self.offset


@dataclass(frozen=True)
class QuadratureRule:
    """Fan + dyadic-subdivision + conical Gauss product rule over each triangle.

    gauss_order q integrates bivariate polynomials of total degree <= 2q-1
    exactly on every subtriangle.
    """

    subdivision_depth: int = 3
    gauss_order: int = 10

    def __post_init__(self) -> None:
        if self.subdivision_depth < 0:
            raise ParameterDomainError("subdivision_depth must be >= 0")
        if self.gauss_order < 1:
            raise ParameterDomainError("gauss_order must be >= 1")

    def refined(self, extra_depth: int = 1) -> "QuadratureRule":
        return QuadratureRule(self.subdivision_depth + extra_depth, self.gauss_order)


class MomentPolytope:
    """Bounded Delzant polygon defined by facet inequalities.

    Vertices (counterclockwise), edge/facet incidence, area and centroid are
    derived at construction and cached.  Instances are immutable and hashable.
    """

    def __init__(self, facets) -> None:
        facets = tuple(f if isinstance(f, Facet) else Facet(tuple(f[0]), f[1]) for f in facets)
        if len(facets) < 3:
            raise ParameterDomainError("a polygon needs at least 3 facets")
        self._facets = facets
        self._normals = np.array([f.normal for f in facets], dtype=float)
        self._offsets = np.array([f.offset for f in facets], dtype=float)
        self._derive_geometry()

    # -- construction ----------------------------------------------------

    def _derive_geometry(self) -> None:
        K = len(self._facets)
        scale = max(1.0, float(np.abs(self._offsets).max()))
        tol = _GEOM_TOL * scale
        points: list[np.ndarray] = []
        active_sets: list[set[int]] = []
        for i in range(K):
            for j in range(i + 1, K):
                A = self._normals[[i, j]]
                det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
                if abs(det) < 1e-12:
                    continue
                x = np.linalg.solve(A, -self._offsets[[i, j]])
                vals = self._normals @ x + self._offsets
                if np.min(vals) < -tol:
                    continue
                active = {k for k in range(K) if abs(vals[k]) <= tol}
                for idx, q in enumerate(points):
                    if np.hypot(*(q - x)) <= 10 * tol:
                        active_sets[idx] |= active
                        break
                else:
                    points.append(x)
                    active_sets.append(active)
        if len(points) < 3:
            raise ParameterDomainError("facets do not bound a polygon with interior")
        center = np.mean(points, axis=0)
        order = np.argsort([math.atan2(*(p - center)[::-1]) for p in points])
        verts = np.array([points[k] for k in order])
        actives = [active_sets[k] for k in order]

        for idx, act in enumerate(actives):
            if len(act) != 2:
                raise ParameterDomainError(
                    f"vertex {verts[idx]} lies on {len(act)} facets; polygon is degenerate")

        N = len(verts)
        edge_facets = []
        for i in range(N):
            common = actives[i] & actives[(i + 1) % N]
            if len(common) != 1:
                raise ParameterDomainError("could not match an edge to a unique facet")
            edge_facets.append(common.pop())
        if sorted(edge_facets) != list(range(K)):
            raise ParameterDomainError("every facet must support exactly one edge")

        for i in range(N):
            n1 = self._facets[edge_facets[i - 1]].normal
            n2 = self._facets[edge_facets[i]].normal
            det = n1[0] * n2[1] - n1[1] * n2[0]
            if abs(det) != 1:
                raise ParameterDomainError(
                    f"Delzant condition fails at vertex {verts[i]}: |det| = {abs(det)}")

        # Sorting by angle around an interior point already gives CCW order.
        area = 0.5 * float(np.sum(verts[:, 0] * np.roll(verts[:, 1], -1)
                                  - np.roll(verts[:, 0], -1) * verts[:, 1]))
        if area <= tol:
            raise ParameterDomainError("polygon has empty interior")

        self._vertices = verts
        self._edge_facets = tuple(edge_facets)
        self._area = area
        self._centroid = np.mean(verts, axis=0)

    # -- immutable surface -----------------------------------------------

    @property
    def facets(self) -> tuple[Facet, ...]:
        return self._facets

    @property
    def vertices(self) -> np.ndarray:
        """Vertices in counterclockwise order, shape (N, 2)."""
        return self._vertices.copy()

    @property
    def area(self) -> float:
        return self._area

    @property
    def centroid(self) -> np.ndarray:
        return self._centroid.copy()

    def __eq__(self, other) -> bool:
        return isinstance(other, MomentPolytope) and self._facets == other._facets

    def __hash__(self) -> int:
        return hash(self._facets)

    def __repr__(self) -> str:
        ineqs = ", ".join(f"<{f.normal},x>+{f.offset:g}>=0" for f in self._facets)
        return f"MomentPolytope({ineqs})"

    # -- queries -----------------------------------------------------------

    def support_values(self, x: np.ndarray) -> np.ndarray:
        """All l_k(x); shape (K,) for a point or (n, K) for a batch."""
        return np.asarray(x, dtype=float) @ self._normals.T + self._offsets

    def contains_interior(self, x: np.ndarray, margin: float = 0.0) -> np.ndarray:
        vals = self.support_values(x)
        return np.min(vals, axis=-1) > margin

    def require_interior(self, x: np.ndarray) -> None:
        inside = np.asarray(self.contains_interior(x))
        if not inside.all():
            bad = np.atleast_2d(np.asarray(x, dtype=float))[~np.atleast_1d(inside)][0]
            raise InteriorDomainError(f"point {bad} is not strictly inside the polygon")

    def support_jets(self, points: np.ndarray) -> list[Jet2]:
        """Jets of every facet function at the given points."""
        xj, yj = Jet2.coordinates(points)
        return [xj * float(f.normal[0]) + yj * float(f.normal[1]) + f.offset
                for f in self._facets]


def make_blowup_polytope(p: float) -> MomentPolytope:
    """Moment polygon of the one-point blow-up of the projective plane.

    Facets: mu_1 >= 0, mu_2 >= 0, p - mu_1 >= 0, 1 - mu_1 - mu_2 >= 0;
    vertices (0,0), (p,0), (p,1-p), (0,1).  Requires 0 < p < 1.
    """
    if not 0.0 < p < 1.0:
        raise ParameterDomainError(f"blow-up parameter must satisfy 0 < p < 1, got {p}")
    return MomentPolytope([
        Facet((1, 0), 0.0),
        Facet((0, 1), 0.0),
        Facet((-1, 0), float(p)),
        Facet((-1, -1), 1.0),
    ])


def standard_simplex() -> MomentPolytope:
    """Unit simplex {x >= 0, x_1 + x_2 <= 1}: the moment polygon of the projective plane."""
    return MomentPolytope([Facet((1, 0), 0.0), Facet((0, 1), 0.0), Facet((-1, -1), 1.0)])


def affine_min(f: AffineHamiltonian, P: MomentPolytope) -> float:
    """Exact minimum of an affine function over the polygon (attained at a vertex)."""
    return float(np.min(f(P.vertices)))


def lattice_perimeter(P: MomentPolytope) -> float:
    """Sum over edges of Euclidean length / norm of the primitive edge direction.

    The primitive edge direction is the primitive facet normal rotated by 90
    degrees, so each edge contributes |v2 - v1| / |n|.
    """
    verts = P.vertices
    total = 0.0
    for i, facet_idx in enumerate(P._edge_facets):
        delta = verts[(i + 1) % len(verts)] - verts[i]
        total += float(np.hypot(*delta)) / float(np.hypot(*P.facets[facet_idx].normal))
    return total


# -- quadrature ------------------------------------------------------------


@lru_cache(maxsize=64)
def _reference_conical_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes and weights on the reference triangle, weights summing to 1/2."""
    xj, wj = roots_jacobi(order, 0.0, 1.0)
    u = 0.5 * (1.0 + xj)
    wu = 0.25 * wj
    xl, wl = np.polynomial.legendre.leggauss(order)
    v = 0.5 * (1.0 + xl)
    wv = 0.5 * wl
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    bary = np.stack([(1.0 - U).ravel(), (U * (1.0 - V)).ravel(), (U * V).ravel()], axis=1)
    return bary, W.ravel()


@dataclass(frozen=True)
class PolygonQuadrature:
    nodes: np.ndarray
    weights: np.ndarray


def _triangulate(P: MomentPolytope, depth: int) -> np.ndarray:
    verts = P.vertices
    center = P.centroid
    tris = [np.array([center, verts[i], verts[(i + 1) % len(verts)]])
            for i in range(len(verts))]
    for _ in range(depth):
        refined = []
        for tri in tris:
            p0, p1, p2 = tri
            m01, m12, m20 = 0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)
            refined.extend([
                np.array([p0, m01, m20]),
                np.array([m01, p1, m12]),
                np.array([m20, m12, p2]),
                np.array([m01, m12, m20]),
            ])
        tris = refined
    return np.array(tris)


_QUAD_CACHE: dict[tuple[MomentPolytope, QuadratureRule], PolygonQuadrature] = {}


def polygon_quadrature(P: MomentPolytope, rule: QuadratureRule) -> PolygonQuadrature:
    """Nodes (N,2) strictly inside P and positive weights summing to area(P)."""
    key = (P, rule)
    cached = _QUAD_CACHE.get(key)
    if cached is not None:
        return cached
    bary, wref = _reference_conical_rule(rule.gauss_order)
    tris = _triangulate(P, rule.subdivision_depth)
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    nodes = np.einsum("qb,tbd->tqd", bary, tris).reshape(-1, 2)
    weights = (2.0 * areas[:, None] * wref[None, :]).reshape(-1)
    quad = PolygonQuadrature(nodes=nodes, weights=weights)
    if len(_QUAD_CACHE) > 128:
        _QUAD_CACHE.clear()
    _QUAD_CACHE[key] = quad
    return quad


def _evaluate_field(g, nodes: np.ndarray) -> np.ndarray:
    if isinstance(g, _FieldConstant):
        return np.full(nodes.shape[0], g.value)
    try:
        vals = np.asarray(g(nodes), dtype=float)
        if vals.shape == (nodes.shape[0],):
            return vals
        if vals.shape == ():
            return np.full(nodes.shape[0], float(vals))
    except (TypeError, ValueError, IndexError):
        pass
    return np.array([float(g(node)) for node in nodes])


@dataclass(frozen=True)
class _FieldConstant:
    value: float


def integrate(P: MomentPolytope, g, rule: QuadratureRule = QuadratureRule()) -> float:
    """Quadrature approximation of the Lebesgue integral of g over P.

    g may be a number, or a callable accepting one (2,) point or an (N,2)
    batch.  A non-finite value at any node raises NodeEvaluationError with
    the offending node attached.
    """
    quad = polygon_quadrature(P, rule)
    if isinstance(g, (int, float, np.integer, np.floating)):
        g = _FieldConstant(float(g))
    vals = _evaluate_field(g, quad.nodes)
    finite = np.isfinite(vals)
    if not finite.all():
        bad = quad.nodes[~finite][0]
        raise NodeEvaluationError(f"integrand not finite at node {bad}", node=bad)
    return float(np.sum(quad.weights * vals))


def random_interior_points(P: MomentPolytope, n: int, rng: np.random.Generator,
                           margin: float = 0.0) -> np.ndarray:
    """Rejection-sample n points with every facet value strictly above margin."""
    lo = P.vertices.min(axis=0)
    hi = P.vertices.max(axis=0)
    out = np.empty((0, 2))
    while out.shape[0] < n:
        cand = rng.uniform(lo, hi, size=(4 * n + 16, 2))
        keep = cand[P.contains_interior(cand, margin=margin)]
        out = np.vstack([out, keep])
    return out[:n]


# -- serialization ----------------------------------------------------------


def polytope_to_json(P: MomentPolytope) -> dict:
    return {
        "facets": [{"n": list(f.normal), "lambda": f.offset} for f in P.facets],
        "vertices": [[float(v[0]), float(v[1])] for v in P.vertices],
    }


def polytope_from_json(data: dict | str) -> MomentPolytope:
    if isinstance(data, str):
        data = json.loads(data)
    P = MomentPolytope([Facet((f["n"][0], f["n"][1]), f["lambda"]) for f in data["facets"]])
    stored = np.asarray(data.get("vertices", P.vertices), dtype=float)
    if stored.shape != P.vertices.shape or not np.allclose(stored, P.vertices, atol=1e-9):
        raise ParameterDomainError("stored vertices are inconsistent with the facet data")
    return P
