"""High-order quadrature on the round sphere.

Each flat icosphere face is mapped radially onto its spherical triangle and
integrated with a 7-point degree-5 triangle rule, including the Jacobian of
the radial projection.  Used to evaluate continuum energies of analytic
fields, independently of the PL discretization.
"""
from __future__ import annotations

import numpy as np

from .mesh import build_icosphere

# degree-5 rule on the reference triangle (barycentric coordinates, weights sum to 1)
_a1, _b1 = 0.059715871789770, 0.470142064105115
_a2, _b2 = 0.797426985353087, 0.101286507323456
_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_a1, _b1, _b1], [_b1, _a1, _b1], [_b1, _b1, _a1],
    [_a2, _b2, _b2], [_b2, _a2, _b2], [_b2, _b2, _a2],
])
_W = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)


def sphere_quadrature(level: int = 5):
    """Points (N, 3) on the unit sphere and weights (N,) with sum 4*pi."""
    mesh = build_icosphere(level)
    p = mesh.vertices[mesh.faces]                          # (F, 3, 3)
    cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    area = 0.5 * np.linalg.norm(cr, axis=1)
    nrm = cr / (2 * area)[:, None]
    q = np.einsum("kc,fcd->fkd", _BARY, p)                 # (F, 7, 3) planar points
    r = np.linalg.norm(q, axis=2)
    jac = np.einsum("fkd,fd->fk", q, nrm) / r ** 3         # radial projection Jacobian
    pts = (q / r[..., None]).reshape(-1, 3)
    w = (area[:, None] * _W[None, :] * jac).reshape(-1)
    return pts, w


def tangent_frame(x):
    """Orthonormal tangent pair (e1, e2) at each unit point x (..., 3), e1 x e2 = x."""
    x = np.asarray(x, dtype=float)
    helper = np.where(np.abs(x[..., :1]) < 0.9, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    e1 = np.cross(x, helper)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(x, e1)
    return e1, e2


def directional_derivative(fn, x, v, h=1e-4):
    """D_v fn at unit points x along great circles, Richardson-extrapolated."""
    def at(s):
        y = np.cos(s) * x + np.sin(s) * v
        return fn(y)

    def cd(hh):
        return (at(hh) - at(-hh)) / (2 * hh)

    return (4 * cd(h / 2) - cd(h)) / 3


def continuum_gl_energy(field, epsilon, pts, w):
    """int |grad u|^2/2 + (1-|u|^2)^2/(4 eps^2) for an analytic complex field on S^2.

    `field` maps unit points (..., 3) to complex values; the gradient is
    taken numerically along an orthonormal tangent frame.
    """
    e1, e2 = tangent_frame(pts)
    g1 = directional_derivative(field, pts, e1)
    g2 = directional_derivative(field, pts, e2)
    u = field(pts)
    dens = 0.5 * (np.abs(g1) ** 2 + np.abs(g2) ** 2) + (1 - np.abs(u) ** 2) ** 2 / (4 * epsilon ** 2)
    return float(w @ dens)
