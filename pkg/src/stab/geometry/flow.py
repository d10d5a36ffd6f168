"""Flows of sphere vector fields and pullback of vertex data along them."""
from __future__ import annotations

import weakref

import numpy as np
import scipy.linalg as sla

from ..kernels import locate_points
from .jets import FieldJet, cross_matrix
from .mesh import TriMesh


def conformal_flow(x, xi, t):
    """Time-t flow of X_xi = xi - <x, xi> x for unit xi; x may be (..., n+1).

    Writing x = cos(th) xi + sin(th) v, the flow keeps v and moves th to
    2 atan(e^{-t} tan(th/2)).
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    c = np.clip(np.einsum("...i,i->...", x, xi), -1.0, 1.0)
    w = x - c[..., None] * xi
    s = np.linalg.norm(w, axis=-1)
    th = np.arctan2(s, c)
    th_t = 2.0 * np.arctan2(np.exp(-t) * np.sin(th / 2.0), np.cos(th / 2.0))
    safe = np.where(s > 0, s, 1.0)
    v = w / safe[..., None]
    out = np.cos(th_t)[..., None] * xi + np.sin(th_t)[..., None] * v
    # the poles +-xi are fixed points
    return np.where((s > 0)[..., None], out, x)


def rotation_flow(x, a, t):
    """Rotation by angle t|a| about a: the flow of x -> a x x."""
    R = sla.expm(t * cross_matrix(a))
    return np.asarray(x) @ R.T


def rk4_flow(jet: FieldJet, x, t, steps=64):
    """Classical RK4 integration of x' = X(x), renormalized to the sphere."""
    x = np.array(x, dtype=float)
    h = t / steps
    for _ in range(steps):
        k1 = jet.x(x)
        k2 = jet.x(x + 0.5 * h * k1)
        k3 = jet.x(x + 0.5 * h * k2)
        k4 = jet.x(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        x /= np.linalg.norm(x, axis=-1, keepdims=True)
    return x


def jet_flow(jet: FieldJet, x, t, steps=64):
    """Flow of a jet: closed form for conformal and rotation jets, RK4 otherwise."""
    if jet.kind == "conformal":
        r = np.linalg.norm(jet.c)
        if r == 0:
            return np.array(x, dtype=float)
        return conformal_flow(x, jet.c / r, r * t)
    if jet.kind == "rotation":
        B = jet.B
        return rotation_flow(x, np.array([B[2, 1], B[0, 2], B[1, 0]]), t)
    return rk4_flow(jet, x, t, steps)


class _Locator:
    def __init__(self, mesh: TriMesh):
        p = mesh.vertices[mesh.faces]
        self.C = np.ascontiguousarray(np.stack(
            [np.cross(p[:, (k + 1) % 3], p[:, (k + 2) % 3]) for k in range(3)], axis=1))
        flat = mesh.faces.ravel()
        order = np.argsort(flat, kind="stable")
        self.vf_idx = np.ascontiguousarray(order // 3, dtype=np.int64)
        counts = np.bincount(flat, minlength=mesh.n_vertices)
        self.vf_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.first_face = self.vf_idx[self.vf_ptr[:-1]]
        self.adj = np.ascontiguousarray(mesh.face_adj, dtype=np.int64)
        self.faces = np.ascontiguousarray(mesh.faces, dtype=np.int64)

    def locate(self, pts, seeds=None, use_numba=None):
        if seeds is None:
            seeds = np.zeros(len(pts), dtype=np.int64)
        return locate_points(self.C, self.adj, self.faces, self.vf_ptr, self.vf_idx,
                             pts, seeds, use_numba=use_numba)


_locators: "weakref.WeakKeyDictionary[TriMesh, _Locator]" = weakref.WeakKeyDictionary()


def locator(mesh: TriMesh) -> _Locator:
    loc = _locators.get(mesh)
    if loc is None:
        loc = _locators[mesh] = _Locator(mesh)
    return loc


def interpolate(mesh: TriMesh, u, pts, seeds=None, use_numba=None):
    """Barycentric interpolation of vertex data u at unit points pts."""
    loc = locator(mesh)
    f, lam = loc.locate(pts, seeds, use_numba=use_numba)
    u = np.asarray(u)
    corner = u[mesh.faces[f]]
    if corner.ndim == 2:
        return np.einsum("nk,nk->n", lam, corner)
    return np.einsum("nk,nk...->n...", lam, corner)


def pullback_field(mesh: TriMesh, u, flow, use_numba=None):
    """(pullback u)(x_i) = u(flow(x_i)) by barycentric interpolation."""
    u = np.asarray(u)
    if u.shape[0] != mesh.n_vertices:
        raise ValueError(f"expected {mesh.n_vertices} vertex values, got {u.shape[0]}")
    y = np.asarray(flow(mesh.vertices), dtype=float)
    seeds = locator(mesh).first_face
    return interpolate(mesh, u, y, seeds=seeds, use_numba=use_numba)
