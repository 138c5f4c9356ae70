"""Conformal scalar curvature, its weighted average, and the Futaki character.

For a Kahler metric g with scalar curvature S_J, a positive Killing potential
f, and complex dimension m, the scalar curvature of the conformal metric
f^{-2} g is

    S_f = 2 (2m-1)/(m-1) * f^(m+1) * Delta(f^(1-m)) + S_J * f^2,

with the nonnegative-spectrum Laplacian.  The weighted average and the
character are

    cbar   = Int S_f f^(-(2m+1)) dmu / Int f^(-(2m+1)) dmu,
    Fut(u) = Int (S_f - cbar) u f^(-(2m+1)) dmu.

The cbar subtraction makes Fut independent of adding constants to u, which
replaces the usual mean-zero normalization of the test function.  Fut scales
as lambda^(1-2m) under f -> lambda f, so its vanishing is a condition on the
ray through f, not on f itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, ParameterDomainError, PositivityError
from .polytope import (AffineHamiltonian, MomentPolytope, QuadratureRule, affine_min,
                       integrate, make_blowup_polytope)
from .toric_metric import (ToricMetricModel, WeightedGeometryData, abreu_scalar_curvature,
                           node_weighted_geometry, toric_laplacian)


@dataclass(frozen=True)
class KillingSetup:
    """A positive affine Killing potential f on a moment polygon, with dimension m."""

    polytope: MomentPolytope
    hamiltonian: AffineHamiltonian
    dimension_m: int

    def __post_init__(self) -> None:
        m = self.dimension_m
        if m != int(m) or m < 1:
            raise ParameterDomainError(f"dimension m must be an integer >= 1, got {m}")
        object.__setattr__(self, "dimension_m", int(m))
        fmin = affine_min(self.hamiltonian, self.polytope)
        if fmin <= 0.0:
            raise PositivityError(
                f"Killing potential must be positive on the polygon; min over vertices is {fmin}")

    @property
    def weight_minus(self) -> int:
        return 2 * self.dimension_m - 1

    @property
    def weight_plus(self) -> int:
        return 2 * self.dimension_m + 1


@dataclass(frozen=True)
class WeightedScalarField:
    """Pointwise evaluator of the conformal scalar curvature S_f on the polygon interior."""

    setup: KillingSetup
    metric: ToricMetricModel

    def __call__(self, x) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        m = self.setup.dimension_m
        f = self.setup.hamiltonian
        phi = lambda u, v: (u * f.slope_1 + v * f.slope_2 + f.offset) ** (1 - m)
        lap = toric_laplacian(self.metric, phi, pts)
        s_j = abreu_scalar_curvature(self.metric, pts)
        fv = f(pts)
        vals = 2.0 * (2 * m - 1) / (m - 1) * fv ** (m + 1) * lap + s_j * fv**2
        return float(vals[0]) if np.asarray(x).ndim == 1 else vals


def conformal_scalar_curvature(setup: KillingSetup, metric: ToricMetricModel) -> WeightedScalarField:
    """Field S_f = 2 (2m-1)/(m-1) f^(m+1) Delta(f^(1-m)) + S_J f^2."""
    if setup.dimension_m == 1:
        raise DegeneracyError("the conformal scalar relation degenerates at m = 1 "
                              "(the 1/(m-1) factor)")
    if metric.polytope != setup.polytope:
        raise ParameterDomainError("metric and setup must live on the same polygon")
    return WeightedScalarField(setup=setup, metric=metric)


def _weight_field(setup: KillingSetup):
    f = setup.hamiltonian
    expo = -float(setup.weight_plus)
    return lambda pts: f(pts) ** expo


def weighted_average(setup: KillingSetup, field, rule: QuadratureRule = QuadratureRule()) -> float:
    """cbar = Int S f^(-(2m+1)) dmu / Int f^(-(2m+1)) dmu."""
    w = _weight_field(setup)
    num = integrate(setup.polytope, lambda pts: np.asarray(field(pts)) * w(pts), rule)
    den = integrate(setup.polytope, w, rule)
    return num / den


def futaki_character(setup: KillingSetup, field, u, rule: QuadratureRule = QuadratureRule()) -> float:
    """Fut(u) = Int (S - cbar) u f^(-(2m+1)) dmu; invariant under u -> u + const."""
    cbar = weighted_average(setup, field, rule)
    w = _weight_field(setup)
    return integrate(
        setup.polytope,
        lambda pts: (np.asarray(field(pts)) - cbar) * np.asarray(u(pts)) * w(pts),
        rule,
    )


def futaki_toric(p: float, f: AffineHamiltonian, u: AffineHamiltonian, m: int,
                 rule: QuadratureRule = QuadratureRule()) -> float:
    """Futaki character on the blow-up polygon with the Guillemin metric.

    Test directions u are restricted to affine Hamiltonians (the torus
    directions); the ambient reduced algebra on the blow-up is larger, but
    non-torus directions have no torus-invariant Hamiltonian to integrate.
    """
    P = make_blowup_polytope(p)
    setup = KillingSetup(polytope=P, hamiltonian=f, dimension_m=m)
    field = conformal_scalar_curvature(setup, ToricMetricModel(P))
    return futaki_character(setup, field, u, rule)


class WeightedFutakiEvaluator:
    """Caches per-node curvature data so sweeps over f are cheap.

    For affine f the conformal scalar curvature reduces to

        S_f = 2(2m-1) * ( f * (div U . s) - m * (s^T U s) ) + S_J f^2,

    where s is the slope of f, so one jet pass over the quadrature nodes
    serves every candidate (slope, offset) afterwards.  This expansion is the
    analytic Laplacian of f^(1-m) substituted into the conformal relation;
    tests compare it against the generic jet path.
    """

    def __init__(self, polytope: MomentPolytope, m: int,
                 rule: QuadratureRule = QuadratureRule()) -> None:
        if m < 2:
            raise ParameterDomainError("evaluator requires m >= 2")
        self.polytope = polytope
        self.m = int(m)
        self.rule = rule
        self.geometry: WeightedGeometryData = node_weighted_geometry(
            ToricMetricModel(polytope), rule)

    def conformal_scalar_values(self, f: AffineHamiltonian) -> np.ndarray:
        geo = self.geometry
        m = self.m
        s = f.slope
        fv = geo.nodes @ s + f.offset
        div_term = geo.div_inv_hessian @ s
        quad_term = np.einsum("nij,i,j->n", geo.inv_hessian, s, s)
        return 2.0 * (2 * m - 1) * (fv * div_term - m * quad_term) + geo.scalar * fv**2

    def average_and_futaki(self, f: AffineHamiltonian,
                           directions: tuple[AffineHamiltonian, ...]) -> tuple[float, np.ndarray]:
        """cbar and the vector of Fut along the given directions, in one pass."""
        if affine_min(f, self.polytope) <= 0.0:
            raise PositivityError("Killing potential must be positive on the polygon")
        geo = self.geometry
        fv = geo.nodes @ f.slope + f.offset
        w = geo.weights * fv ** (-(2 * self.m + 1))
        s_f = self.conformal_scalar_values(f)
        den = float(np.sum(w))
        cbar = float(np.sum(w * s_f)) / den
        resid = w * (s_f - cbar)
        futs = np.array([float(np.sum(resid * u(geo.nodes))) for u in directions])
        return cbar, futs
