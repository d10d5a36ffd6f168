"""Per-face evaluation of the YMH inner stability integrand on lattice states over S^2."""
from __future__ import annotations

import numpy as np

from ..geometry import conformal_field_jet, sphere_curvature
from ..ymh.bogomolny import face_covariant_gradient
from .integrands import ymh_integrand


def _face_frames(state):
    m = state.mesh
    q = m.face_points()
    p = m.vertices[m.faces]
    e1 = p[:, 1] - p[:, 0]
    e1 -= np.einsum("fi,fi->f", e1, q)[:, None] * q
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(q, e1)
    return q, np.stack([e1, e2], axis=1)


def face_field_data(state):
    """Per face: (point, frame, F (2x2), Du (2,), e_eps)."""
    q, E = _face_frames(state)
    G = face_covariant_gradient(state)
    Du = np.einsum("fk,fik->fi", G, E)
    starF = state.bundle.fluxes() / state.ops.areas
    eps = state.epsilon
    pot = np.mean((1 - np.abs(state.u[state.mesh.faces]) ** 2) ** 2, axis=1) / (4 * eps ** 2)
    e = eps ** 2 * starF ** 2 + np.sum(np.abs(Du) ** 2, axis=1) + pot
    return q, E, starF, Du, e


def sphere_per_xi_stability_integrand(state, xi, data=None):
    """Face-quadrature of the stability integrand for the conformal field X_xi."""
    q, E, starF, Du, e = face_field_data(state) if data is None else data
    jet = conformal_field_jet(np.asarray(xi, dtype=float), 2)
    grads = jet.grad(q)                       # (F, 3, 3) ambient
    X = jet.x(q)
    A = np.einsum("fia,fba,fjb->fij", E, grads, E)
    eps = state.epsilon
    areas = state.ops.areas
    Ei = E[:, :, None, :]
    Ej = E[:, None, :, :]
    Xb = X[:, None, None, :]
    Rxx = sphere_curvature(Ei, Xb, Xb, Ej)
    F = np.zeros((len(q), 2, 2))
    F[:, 0, 1] = starF
    F[:, 1, 0] = -starF
    vals = ymh_integrand(e, F, Du, eps, A, np.trace(Rxx, axis1=1, axis2=2), Rxx)
    return float(np.dot(vals, areas))


def per_xi_report(state):
    """The three basis integrands, their sum and the n = 2 target 8 eps^2 int |F|^2."""
    data = face_field_data(state)
    vals = [sphere_per_xi_stability_integrand(state, xi, data) for xi in np.eye(3)]
    starF = data[2]
    target = 8 * state.epsilon ** 2 * float(np.dot(starF ** 2, state.ops.areas))
    return {"perXi": vals, "sum": float(sum(vals)), "target": target}
