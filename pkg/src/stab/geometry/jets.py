"""Closed-form jets of conformal and Killing vector fields on the unit sphere S^n.

Every field here has the form X(x) = P_x(c + B x), with P_x = I - x x^T the
tangent projector at x.  Translations (B = 0, c = xi) give the conformal
fields xi - <x, xi> x; antisymmetric B with c = 0 gives Killing fields.  Sums
stay in the family, so linear combinations are closed.

Covariant derivatives are the tangential parts of ambient derivatives.  A
(1,1)-tensor at x is returned as an ambient matrix A with A v = nabla_v X for
tangent v, and A = P A P.  All callbacks accept points of shape (..., n+1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _proj(x):
    n1 = x.shape[-1]
    return np.eye(n1) - x[..., :, None] * x[..., None, :]


def _mv(A, v):
    return np.einsum("...ij,...j->...i", A, v)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


@dataclass(frozen=True)
class FieldJet:
    c: np.ndarray
    B: np.ndarray
    kind: str
    n: int

    @property
    def ambient_dim(self):
        return self.n + 1

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        Y = self.c + _mv(self.B, x) if x.ndim > 1 else self.c + self.B @ x
        s = _dot(x, Y)
        X = Y - s[..., None] * x
        return x, Y, s, X

    def x(self, x):
        """The field value X(x)."""
        return self._parts(x)[3]

    def grad(self, x):
        """nabla X at x: P B P - <x, c + Bx> P."""
        x, _, s, _ = self._parts(x)
        P = _proj(x)
        return P @ self.B @ P - s[..., None, None] * P

    def div(self, x):
        return np.trace(self.grad(x), axis1=-2, axis2=-1)

    def lie_g(self, x):
        """Lie derivative of the metric: (nabla X) + (nabla X)^T on tangent vectors."""
        G = self.grad(x)
        return G + np.swapaxes(G, -1, -2)

    def nabla_xx(self, x):
        """nabla_X X."""
        return _mv(self.grad(x), self.x(x))

    def grad_nabla_xx(self, x):
        """nabla (nabla_X X) at x as a matrix on tangent vectors."""
        x, Y, s, X = self._parts(x)
        P = _proj(x)
        B = self.B
        G = P @ B @ P - s[..., None, None] * P
        ds = Y + _mv(np.swapaxes(np.broadcast_to(B, G.shape), -1, -2), x)  # gradient of s
        xBX = _dot(x, _mv(np.broadcast_to(B, G.shape), X))
        outer = lambda a, b: a[..., :, None] * b[..., None, :]
        # ambient derivative of X along v: B v - (ds . v) x - s v
        DX = B - outer(x, ds) - s[..., None, None] * np.eye(self.n + 1)
        term = P @ B @ DX - xBX[..., None, None] * np.eye(self.n + 1) - outer(X, ds) - s[..., None, None] * G
        return P @ term @ P

    def div_nabla_xx(self, x):
        return np.trace(self.grad_nabla_xx(x), axis1=-2, axis2=-1)

    def __add__(self, other):
        if self.n != other.n:
            raise ValueError("jets live on spheres of different dimension")
        return FieldJet(self.c + other.c, self.B + other.B, "linear-combination", self.n)

    def __rmul__(self, a):
        return FieldJet(a * self.c, a * self.B, "linear-combination" if a != 1 else self.kind, self.n)


def conformal_field_jet(xi, n: int | None = None) -> FieldJet:
    """Jet of X_xi(x) = xi - <x, xi> x on S^n (xi in R^{n+1})."""
    xi = np.asarray(xi, dtype=float)
    if n is None:
        n = xi.size - 1
    if xi.shape != (n + 1,):
        raise ValueError(f"xi must have length n+1 = {n + 1}")
    return FieldJet(xi.copy(), np.zeros((n + 1, n + 1)), "conformal", n)


def cross_matrix(a):
    a = np.asarray(a, dtype=float)
    return np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])


def rotation_field_jet(a) -> FieldJet:
    """Jet of the Killing field X(x) = a x x on S^2."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError("rotation fields need ambient dimension 3")
    return FieldJet(np.zeros(3), cross_matrix(a), "rotation", 2)


# constant curvature one: R_{X,Y}Z = <Y,Z>X - <X,Z>Y

def sphere_curvature(X, Y, Z, W):
    """R(X, Y, Z, W) = <R_{X,Y} Z, W> on the unit sphere."""
    return _dot(Y, Z) * _dot(X, W) - _dot(X, Z) * _dot(Y, W)


def sphere_ricci(X, Y, n):
    return (n - 1) * _dot(X, Y)
