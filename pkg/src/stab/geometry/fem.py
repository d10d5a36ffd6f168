"""Piecewise-linear finite elements on a TriMesh."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..spectral import lowest_eigenpairs
from .mesh import MeshError, TriMesh


@dataclass(frozen=True, eq=False)
class FemOperators:
    mesh: TriMesh
    mass: sp.csr_matrix           # consistent mass
    lumped: np.ndarray            # lumped (barycentric) mass diagonal
    stiffness: sp.csr_matrix      # cotangent stiffness
    grad: sp.csr_matrix           # (3F, V): vertex values -> face gradient components
    areas: np.ndarray
    normals: np.ndarray
    edge_weights: np.ndarray      # cotangent weight per stored edge, = -stiffness[i, j]
    vertex_face: sp.csr_matrix = field(repr=False)  # (V, F) area-weighted averaging

    def face_gradient(self, u):
        u = np.asarray(u)
        if u.shape[0] != self.mesh.n_vertices:
            raise ValueError(f"expected {self.mesh.n_vertices} vertex values, got {u.shape[0]}")
        return (self.grad @ u).reshape(self.mesh.n_faces, 3)


def assemble_fem(mesh: TriMesh) -> FemOperators:
    v = mesh.vertices
    f = mesh.faces
    nv, nf = mesh.n_vertices, mesh.n_faces
    p = v[f]                                    # (F, 3 corners, 3)
    cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    dbl = np.linalg.norm(cr, axis=1)            # twice the area
    scale = np.max(np.linalg.norm(p[:, 1] - p[:, 0], axis=1)) ** 2
    if np.any(dbl <= 1e-14 * scale):
        bad = int(np.argmin(dbl))
        raise MeshError(f"degenerate triangle at face {bad}")
    areas = 0.5 * dbl
    normals = cr / dbl[:, None]

    # gradients of the hat functions: grad phi_k = n x e_k / (2A), e_k opposite vertex k
    rows, cols, vals = [], [], []
    frange = np.arange(nf)
    for k in range(3):
        e = p[:, (k + 2) % 3] - p[:, (k + 1) % 3]
        g = np.cross(normals, e) / dbl[:, None]
        for d in range(3):
            rows.append(3 * frange + d)
            cols.append(f[:, k])
            vals.append(g[:, d])
    grad = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(3 * nf, nv))

    # cotangent weights: the angle at corner k faces the edge (k+1, k+2)
    wrows, wcols, wvals = [], [], []
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cot = np.einsum("ij,ij->i", a, b) / dbl
        wrows.append(f[:, (k + 1) % 3])
        wcols.append(f[:, (k + 2) % 3])
        wvals.append(0.5 * cot)
    i = np.concatenate(wrows)
    j = np.concatenate(wcols)
    w = np.concatenate(wvals)
    off = sp.coo_matrix((w, (i, j)), shape=(nv, nv)).tocsr()
    off = off + off.T
    off.sum_duplicates()
    diag = np.asarray(off.sum(axis=1)).ravel()
    stiffness = (sp.diags(diag) - off).tocsr()
    stiffness.sort_indices()

    e = mesh.edges
    edge_weights = np.asarray(off[e[:, 0], e[:, 1]]).ravel()

    lumped = np.bincount(f.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=nv)

    mi = np.repeat(f, 3, axis=1).ravel()
    mj = np.tile(f, (1, 3)).ravel()
    local = np.where(np.tile(np.eye(3, dtype=bool).ravel(), nf), 2.0, 1.0)
    mv = local * np.repeat(areas / 12.0, 9)
    mass = sp.coo_matrix((mv, (mi, mj)), shape=(nv, nv)).tocsr()
    mass.sort_indices()

    vf = sp.coo_matrix((np.repeat(areas, 3), (f.ravel(), np.repeat(frange, 3))), shape=(nv, nf)).tocsr()
    rs = np.asarray(vf.sum(axis=1)).ravel()
    vertex_face = (sp.diags(1.0 / rs) @ vf).tocsr()

    for a in (areas, normals, lumped, edge_weights):
        a.setflags(write=False)
    return FemOperators(mesh=mesh, mass=mass, lumped=lumped, stiffness=stiffness, grad=grad,
                        areas=areas, normals=normals, edge_weights=edge_weights,
                        vertex_face=vertex_face)


def tangent_project(x, vec):
    """Project vectors vec (..., 3) onto the tangent planes at unit points x."""
    return vec - np.einsum("...i,...i->...", vec, x)[..., None] * x


def gradient_field(ops: FemOperators, u, vertex: bool = False):
    """Per-face gradient (F, 3) of the PL interpolant of u.

    With vertex=True, returns the area-weighted average of the adjacent face
    gradients projected to the exact tangent plane at each vertex.  Complex u
    gives complex output (real and imaginary gradients side by side).
    """
    g = ops.face_gradient(u)
    if not vertex:
        return g
    avg = ops.vertex_face @ g
    return tangent_project(ops.mesh.vertices, avg)


def laplace_spectrum(ops: FemOperators, k: int, seed: int = 0):
    """k lowest eigenpairs of the cotangent Laplacian against the lumped mass."""
    M = sp.diags(ops.lumped)
    # the Laplacian is nonnegative, so any negative number bounds the spectrum below
    return lowest_eigenpairs(ops.stiffness, M, k, -1.0, seed=seed)
