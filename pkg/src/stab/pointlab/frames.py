"""Single-point tangent data: orthonormal frames and random field jets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class FieldData:
    e_eps: float            # energy density stand-in
    grad_u: np.ndarray      # (n, 2): real and imaginary gradient in frame coordinates
    F: np.ndarray           # (n, n) antisymmetric curvature of the connection
    Du: np.ndarray          # (n,) complex covariant derivative
    u: complex
    epsilon: float

    def scaled(self, lam):
        """Quadratic data scaled by lam (gradients by sqrt(lam)), e_eps by lam."""
        r = np.sqrt(lam)
        return FieldData(lam * self.e_eps, r * self.grad_u, r * self.F, r * self.Du, self.u, self.epsilon)


@dataclass
class PointFrame:
    n: int
    point: np.ndarray                           # base point (ambient for spheres)
    frame: np.ndarray                           # (n, ambient) orthonormal rows spanning the tangent space
    curvature: Callable                         # (X, Y, Z, W) -> <R_{X,Y} Z, W>, ambient vectors
    data: FieldData
    seed: int

    def check(self, tol=1e-14):
        G = self.frame @ self.frame.T
        if np.max(np.abs(G - np.eye(self.n))) > tol:
            raise ValueError("frame is not orthonormal")
        if np.max(np.abs(self.data.F + self.data.F.T)) != 0.0:
            raise ValueError("F is not antisymmetric")
        return True


def random_field_data(n, rng, epsilon=None) -> FieldData:
    """Seeded normal samples; F antisymmetrized exactly, e_eps made nonnegative."""
    grad_u = rng.standard_normal((n, 2))
    A = rng.standard_normal((n, n))
    F = A - A.T
    Du = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    u = complex(rng.standard_normal(), rng.standard_normal())
    eps = float(rng.uniform(0.1, 1.0)) if epsilon is None else float(epsilon)
    e_eps = float(abs(rng.standard_normal()))
    return FieldData(e_eps, grad_u, F, Du, u, eps)


def sphere_point(n, rng):
    """Uniform random point on S^n with an orthonormal tangent frame (rows)."""
    x = rng.standard_normal(n + 1)
    x /= np.linalg.norm(x)
    M = np.column_stack([x, rng.standard_normal((n + 1, n))])
    Q, _ = np.linalg.qr(M)
    E = Q[:, 1:].T
    # enforce exact tangency against the QR roundoff
    E -= np.outer(E @ x, x)
    Q2, _ = np.linalg.qr(E.T)
    return x, Q2.T
