"""Second-order forward-mode differentiation in two variables.

A :class:`Jet2` carries the value, gradient, and Hessian of a scalar
expression evaluated at a batch of planar points.  Arithmetic on jets
propagates the Taylor data exactly through products, quotients, powers and
logarithms, so curvature formulas assembled from the closed-form metric
Hessian get second derivatives that are exact up to floating-point rounding.
Finite differences are never used here; they serve only as independent test
oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_Number = (int, float, np.integer, np.floating)


def _outer(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    return np.einsum("ni,nj->nij", g1, g2)


@dataclass(frozen=True)
class Jet2:
    """Batched 2-variable second-order jet: value (n,), gradient (n,2), Hessian (n,2,2)."""

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @staticmethod
    def constant(c, n: int) -> "Jet2":
        return Jet2(np.full(n, float(c)), np.zeros((n, 2)), np.zeros((n, 2, 2)))

    @staticmethod
    def coordinates(points: np.ndarray) -> tuple["Jet2", "Jet2"]:
        """Seed jets for the two coordinate functions at the given (n,2) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = pts.shape[0]
        zeros_h = np.zeros((n, 2, 2))
        gx = np.zeros((n, 2))
        gx[:, 0] = 1.0
        gy = np.zeros((n, 2))
        gy[:, 1] = 1.0
        return (Jet2(pts[:, 0].copy(), gx, zeros_h),
                Jet2(pts[:, 1].copy(), gy, zeros_h.copy()))

    # -- ring operations -------------------------------------------------

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        if isinstance(other, _Number):
            return Jet2.constant(other, self.value.shape[0])
        raise TypeError(f"cannot combine Jet2 with {type(other).__name__}")

    def __add__(self, other) -> "Jet2":
        o = self._lift(other)
        return Jet2(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other) -> "Jet2":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Jet2":
        return (-self) + self._lift(other)

    def __mul__(self, other) -> "Jet2":
        o = self._lift(other)
        value = self.value * o.value
        grad = self.grad * o.value[:, None] + o.grad * self.value[:, None]
        hess = (self.hess * o.value[:, None, None]
                + o.hess * self.value[:, None, None]
                + _outer(self.grad, o.grad) + _outer(o.grad, self.grad))
        return Jet2(value, grad, hess)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet2":
        return self * self._lift(other)._reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return self._lift(other) * self._reciprocal()

    def _chain(self, f0: np.ndarray, f1: np.ndarray, f2: np.ndarray) -> "Jet2":
        """Compose with a scalar function given its value/first/second derivative at self.value."""
        grad = f1[:, None] * self.grad
        hess = f1[:, None, None] * self.hess + f2[:, None, None] * _outer(self.grad, self.grad)
        return Jet2(f0, grad, hess)

    def _reciprocal(self) -> "Jet2":
        v = self.value
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __pow__(self, k) -> "Jet2":
        if not isinstance(k, _Number):
            raise TypeError("Jet2 exponent must be a number")
        k = float(k)
        v = self.value
        return self._chain(v**k, k * v**(k - 1.0), k * (k - 1.0) * v**(k - 2.0))

    def log(self) -> "Jet2":
        v = self.value
        return self._chain(np.log(v), 1.0 / v, -1.0 / v**2)

    def sqrt(self) -> "Jet2":
        return self**0.5

    # -- read-out helpers ------------------------------------------------

    @property
    def laplacian_raw(self) -> np.ndarray:
        """Trace of the Hessian (coordinate Laplacian, no metric)."""
        return self.hess[:, 0, 0] + self.hess[:, 1, 1]
