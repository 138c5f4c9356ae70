"""Structural identities of the weighted curvature and its character pairing."""

import numpy as np
import pytest

from ckemlab.errors import (DegeneracyError, ParameterDomainError,
                            PositivityError)
from ckemlab.invariants import (KillingSetup, WeightedFutakiEvaluator,
                                conformal_scalar_curvature, futaki_character,
                                futaki_toric, weighted_average)
from ckemlab.polytope import (AffineHamiltonian, QuadratureRule,
                              make_blowup_polytope, random_interior_points,
                              standard_simplex)
from ckemlab.toric_metric import ToricMetricModel

MU1 = AffineHamiltonian(1.0, 0.0, 0.0)
MU2 = AffineHamiltonian(0.0, 1.0, 0.0)
RULE = QuadratureRule(2, 8)


def test_setup_validation():
    P = make_blowup_polytope(0.5)
    setup = KillingSetup(P, AffineHamiltonian(0.1, 0.0, 1.0), 2)
    assert setup.weight_minus == 3
    assert setup.weight_plus == 5
    with pytest.raises(PositivityError):
        KillingSetup(P, AffineHamiltonian(-3.0, 0.0, 1.0), 2)
    with pytest.raises(ParameterDomainError):
        KillingSetup(P, AffineHamiltonian(0.0, 0.0, 1.0), 0)
    with pytest.raises(DegeneracyError):
        conformal_scalar_curvature(KillingSetup(P, AffineHamiltonian(0.0, 0.0, 1.0), 1),
                                   ToricMetricModel(P))
    with pytest.raises(ParameterDomainError):
        conformal_scalar_curvature(setup, ToricMetricModel(standard_simplex()))


def test_constant_potential_reduces_to_plain_curvature():
    # f == 1: the conformal correction vanishes and cbar is the plain average
    P = standard_simplex()
    setup = KillingSetup(P, AffineHamiltonian(0.0, 0.0, 1.0), 2)
    field = conformal_scalar_curvature(setup, ToricMetricModel(P))
    pts = random_interior_points(P, 40, np.random.default_rng(0))
    np.testing.assert_allclose(field(pts), 12.0, rtol=0, atol=1e-8)
    assert weighted_average(setup, field, RULE) == pytest.approx(12.0, abs=1e-9)
    for u in (MU1, MU2):
        assert futaki_character(setup, field, u, RULE) == pytest.approx(0.0, abs=1e-12)


def test_character_invariant_under_constant_shift():
    f = AffineHamiltonian(-0.1, 0.05, 0.8)
    u_shifted = AffineHamiltonian(1.0, 0.0, 17.3)
    base = futaki_toric(0.5, f, MU1, 2, RULE)
    shifted = futaki_toric(0.5, f, u_shifted, 2, RULE)
    assert shifted == pytest.approx(base, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_character_homogeneity_in_the_potential(lam):
    # scaling f by lam scales the character by lam^(1-2m) at m = 2
    f = AffineHamiltonian(-0.15, 0.1, 0.9)
    fl = AffineHamiltonian(lam * -0.15, lam * 0.1, lam * 0.9)
    for u in (MU1, MU2):
        base = futaki_toric(0.4, f, u, 2, RULE)
        scaled = futaki_toric(0.4, fl, u, 2, RULE)
        assert scaled == pytest.approx(lam ** (-3) * base, rel=1e-9)


def test_reflection_symmetry_ties_the_two_components():
    # the polygon is invariant under (x1, x2) -> (x1, 1 - x1 - x2); for a
    # potential with no mu_2 slope this forces Fut(mu_1) = -2 Fut(mu_2)
    evaluator = WeightedFutakiEvaluator(make_blowup_polytope(0.65), 2, RULE)
    for slope, offset in [(-0.2, 0.9), (0.1, 0.5), (-0.45, 1.7)]:
        f = AffineHamiltonian(slope, 0.0, offset)
        _, fut = evaluator.average_and_futaki(f, (MU1, MU2))
        assert fut[0] == pytest.approx(-2.0 * fut[1], rel=1e-8, abs=1e-13)


def test_evaluator_fast_path_matches_generic_jets():
    p, m = 0.35, 3
    P = make_blowup_polytope(p)
    f = AffineHamiltonian(-0.3, 0.2, 0.8)
    evaluator = WeightedFutakiEvaluator(P, m, RULE)
    setup = KillingSetup(P, f, m)
    field = conformal_scalar_curvature(setup, ToricMetricModel(P))
    pts = evaluator.geometry.nodes[::97]
    idx = np.arange(0, len(evaluator.geometry.nodes), 97)
    fast = evaluator.conformal_scalar_values(f)[idx]
    np.testing.assert_allclose(fast, field(pts), rtol=1e-9, atol=1e-9)

    cbar_fast, fut_fast = evaluator.average_and_futaki(f, (MU1, MU2))
    assert cbar_fast == pytest.approx(weighted_average(setup, field, RULE), rel=1e-11)
    assert fut_fast[0] == pytest.approx(futaki_toric(p, f, MU1, m, RULE), rel=1e-9, abs=1e-13)
    assert fut_fast[1] == pytest.approx(futaki_toric(p, f, MU2, m, RULE), rel=1e-9, abs=1e-13)


def test_evaluator_rejects_nonpositive_potentials():
    evaluator = WeightedFutakiEvaluator(make_blowup_polytope(0.5), 2, RULE)
    with pytest.raises(PositivityError):
        evaluator.average_and_futaki(AffineHamiltonian(-1.0, 0.0, 0.2), (MU1,))
    with pytest.raises(ParameterDomainError):
        WeightedFutakiEvaluator(make_blowup_polytope(0.5), 1, RULE)


def test_character_converges_under_refinement():
    f = AffineHamiltonian(-0.2, 0.1, 0.7)
    coarse = futaki_toric(0.5, f, MU1, 2, QuadratureRule(1, 6))
    fine = futaki_toric(0.5, f, MU1, 2, QuadratureRule(3, 10))
    assert coarse == pytest.approx(fine, rel=1e-6, abs=1e-10)
