"""Inner variations: derivatives of the energy along pullbacks by sphere flows.

Gradient terms use one point per face (the centroid pushed to the sphere,
with the face gradient projected to the tangent plane there); potential
terms use the lumped vertex masses with the jet evaluated at the vertices.
"""
from __future__ import annotations

import numpy as np

from ..geometry import FieldJet, conformal_field_jet, gradient_field, sphere_curvature
from .energy import GLState, potential_density


def _faces(state: GLState):
    ops = state.ops
    q = ops.mesh.face_points()
    g = gradient_field(ops, state.u)
    g = g - np.einsum("fd,fd->f", g, q)[:, None] * q
    comps = np.stack([g.real, g.imag])          # (2, F, 3): one real gradient per component
    dens = 0.5 * np.einsum("afd,afd->f", comps, comps)
    return q, ops.areas, comps, dens


def _mv(A, v):
    return np.einsum("...ij,...j->...i", A, v)


def gl_inner_first(state: GLState, X: FieldJet) -> float:
    """int <nabla_{grad u} X, grad u> - e(u) Div X."""
    q, area, comps, dens = _faces(state)
    G = X.grad(q)
    stretch = np.einsum("afi,fij,afj->f", comps, G, comps)
    face = area @ (stretch - dens * X.div(q))
    x = state.ops.mesh.vertices
    vert = state.ops.lumped @ (potential_density(state.u, state.epsilon) * X.div(x))
    return float(face - vert)


def _q1(X: FieldJet, p):
    G = X.grad(p)
    Xv = X.x(p)
    n = X.n
    div = np.trace(G, axis1=-2, axis2=-1)
    ric = (n - 1) * np.einsum("...i,...i->...", Xv, Xv)
    return div ** 2 - ric - np.einsum("...ij,...ji->...", G, G) + X.div_nabla_xx(p)


def gl_inner_second_general(state: GLState, X: FieldJet) -> float:
    """Full second inner variation with constant-curvature-one terms."""
    q, area, comps, dens = _faces(state)
    G = X.grad(q)
    Gy = X.grad_nabla_xx(q)
    Xv = X.x(q)
    div = X.div(q)
    L = G + np.swapaxes(G, -1, -2)
    q1 = _q1(X, q)
    q2 = np.zeros(len(q))
    q3 = np.zeros(len(q))
    for a in range(2):
        du = comps[a]
        Gdu = _mv(G, du)
        q2 += (2.0 * np.einsum("fi,fi->f", Gdu, du) * div
               - sphere_curvature(du, Xv, Xv, du)
               + np.einsum("fi,fi->f", Gdu, Gdu)
               + np.einsum("fi,fij,fj->f", du, Gy, du))
        Ldu = _mv(L, du)
        q3 += np.einsum("fi,fi->f", Ldu, Ldu)
    face = area @ (dens * q1 - q2 + q3)
    x = state.ops.mesh.vertices
    vert = state.ops.lumped @ (potential_density(state.u, state.epsilon) * _q1(X, x))
    return float(face + vert)


def critical_integrand_terms(f, gsq, gx, e, n):
    """Second inner variation integrand at a point for X_xi, |xi| = 1, on S^n.

    f = <x, xi>, gsq = |grad u|^2, gx = |<grad u, X_xi>|^2, e = energy density.
    """
    return (e * (n * n * f * f - (n - 1) * (1 - f * f) - n * f * f)
            - (2 * n * f * f * gsq - (1 - f * f) * gsq + gx + f * f * gsq)
            + 4 * f * f * gsq)


def gl_inner_second_critical(state: GLState, xi) -> float:
    """Second inner variation along X_xi specialized with the conformal identities (n = 2)."""
    xi = np.asarray(xi, dtype=float)
    xi = xi / np.linalg.norm(xi)
    q, area, comps, dens = _faces(state)
    f = q @ xi
    Xv = conformal_field_jet(xi).x(q)
    gsq = np.einsum("afd,afd->f", comps, comps)
    gx = np.einsum("afd,fd->af", comps, Xv)
    gx = (gx ** 2).sum(axis=0)
    face = area @ critical_integrand_terms(f, gsq, gx, dens, 2)
    x = state.ops.mesh.vertices
    fv = x @ xi
    pot = potential_density(state.u, state.epsilon)
    vert = state.ops.lumped @ (pot * (4 * fv * fv - (1 - fv * fv) - 2 * fv * fv))
    return float(face + vert)
