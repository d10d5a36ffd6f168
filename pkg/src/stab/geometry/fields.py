"""Analytic complex polynomial fields restricted to the sphere.

Used as smooth test data whose composition with a flow can be sampled
exactly, which the mesh-interpolated pullback cannot do at t -> 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np


@dataclass(frozen=True)
class PolynomialField:
    exponents: np.ndarray     # (m, 3) integer powers of x1, x2, x3
    coeffs: np.ndarray        # (m,) complex

    @staticmethod
    def _combine(x, exps, coeffs):
        # power tables per coordinate, then one gather per monomial
        flat = x.reshape(-1, 3)
        top = int(exps.max()) if exps.size else 0
        pw = np.ones((3, top + 1, len(flat)))
        for k in range(1, top + 1):
            pw[:, k] = pw[:, k - 1] * flat.T
        mono = pw[0, exps[:, 0]] * pw[1, exps[:, 1]] * pw[2, exps[:, 2]]
        return (coeffs @ mono).reshape(x.shape[:-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self._combine(x, self.exponents, self.coeffs)

    def tangent_gradient(self, x):
        """Complex tangential gradient (..., 3) of the restriction to S^2."""
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape, dtype=complex)
        for d in range(3):
            e = self.exponents.copy()
            k = e[:, d].astype(float)
            e[:, d] = np.maximum(e[:, d] - 1, 0)
            g[..., d] = self._combine(x, e, k * self.coeffs)
        return g - np.einsum("...i,...i->...", g, x)[..., None] * x


def random_polynomial_field(degree=3, seed=0, scale=1.0) -> PolynomialField:
    rng = np.random.default_rng(seed)
    exps = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(3), d):
            e = np.zeros(3, dtype=int)
            for c in combo:
                e[c] += 1
            exps.append(e)
    exps = np.array(exps)
    coef = scale * (rng.normal(size=len(exps)) + 1j * rng.normal(size=len(exps)))
    coef /= np.sqrt(len(exps))
    return PolynomialField(exps, coef)


def vortex_pair_field() -> PolynomialField:
    """u = x1 + i x2."""
    return PolynomialField(np.array([[1, 0, 0], [0, 1, 0]]), np.array([1.0, 1j]))
