"""Shared exception types.

These distinguish the failure modes that callers are expected to branch on:
bad parameters, points outside the open moment domain, non-finite values at
quadrature nodes, singular linear algebra, and violated positivity
requirements.  Everything else raises plain ValueError/TypeError.
"""

from __future__ import annotations


class ParameterDomainError(ValueError):
    """A scalar parameter lies outside its admissible range (e.g. p not in (0,1))."""


class InteriorDomainError(ValueError):
    """A point is not strictly inside the moment polytope or moment interval."""


class NodeEvaluationError(ArithmeticError):
    """An integrand produced a non-finite value at a quadrature node."""

    def __init__(self, message: str, node) -> None:
        super().__init__(message)
        self.node = node


class DegeneracyError(ArithmeticError):
    """A linear system is singular or a closed-form denominator vanishes."""


class PositivityError(ValueError):
    """A quantity required to be positive on its domain fails to be."""
