"""U(1) lattice bundles on the icosphere and the discrete abelian Higgs energy.

Edge phases live on the stored edges (i, j), i < j, and act as parallel
transport from i to j: the covariant difference along e is u_j - e^{i theta_e} u_i.
A gauge function phi acts by u -> e^{i phi} u, theta_e -> theta_e + phi_j - phi_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from ..geometry import FemOperators, TriMesh
from ..kernels import hopping


class AdmissibilityError(ValueError):
    pass


def wrap(a):
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), 2 * np.pi)


def face_edge_matrix(mesh: TriMesh):
    """Signed incidence (F x E): oriented boundary of each face."""
    f = np.repeat(np.arange(mesh.n_faces), 3)
    return sp.csr_matrix((mesh.face_edge_sign.ravel().astype(float), (f, mesh.face_edges.ravel())),
                         shape=(mesh.n_faces, mesh.n_edges))


def edge_vertex_matrix(mesh: TriMesh):
    """Coboundary d (E x V): (d phi)_e = phi_j - phi_i."""
    e = mesh.edges
    r = np.repeat(np.arange(mesh.n_edges), 2)
    c = e.ravel()
    v = np.tile([-1.0, 1.0], mesh.n_edges)
    return sp.csr_matrix((v, (r, c)), shape=(mesh.n_edges, mesh.n_vertices))


@dataclass(frozen=True, eq=False)
class LatticeBundle:
    mesh: TriMesh
    phases: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.phases, dtype=float)
        if p.shape != (self.mesh.n_edges,):
            raise ValueError(f"need {self.mesh.n_edges} edge phases, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite edge phases")
        p = wrap(p)
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    def raw_flux(self):
        m = self.mesh
        return np.sum(m.face_edge_sign * self.phases[m.face_edges], axis=1)

    def fluxes(self):
        return wrap(self.raw_flux())


def ymh_degree(bundle: LatticeBundle) -> int:
    """(1/2 pi) sum of wrapped plaquette fluxes, checked to be an integer."""
    total = np.sum(bundle.fluxes()) / (2 * np.pi)
    d = int(np.rint(total))
    if abs(total - d) >= 1e-9:
        raise AdmissibilityError(f"total flux / 2pi = {total!r} is not an integer")
    return d


def bundle_init(mesh: TriMesh, degree: int, areas=None) -> LatticeBundle:
    """Degree-d bundle with flux proportional to face area.

    The 2 pi d excess is placed on face 0 (invisible after wrapping) and the
    remaining exact 2-cochain is realized by the minimum-norm edge phases
    theta = d1^T psi, with d1 d1^T psi = target on the dual graph.
    """
    degree = int(degree)
    if areas is None:
        p = mesh.vertices[mesh.faces]
        areas = 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    total = areas.sum()
    target = 2 * np.pi * degree * areas / total
    if np.max(np.abs(target)) >= np.pi:
        raise AdmissibilityError(
            f"degree {degree} too large for level {mesh.level}: max target flux {np.max(np.abs(target)):.3f}")
    if degree == 0:
        return LatticeBundle(mesh, np.zeros(mesh.n_edges))
    b = target.copy()
    b[0] -= 2 * np.pi * degree
    d1 = face_edge_matrix(mesh)
    lap = (d1 @ d1.T).tocsc()
    psi = np.zeros(mesh.n_faces)
    psi[1:] = sla.spsolve(lap[1:, 1:], b[1:])
    theta = d1.T @ psi
    bundle = LatticeBundle(mesh, theta)
    if ymh_degree(bundle) != degree:
        raise AdmissibilityError("constructed bundle has the wrong degree")
    return bundle


@dataclass(frozen=True, eq=False)
class YMHState:
    bundle: LatticeBundle
    u: np.ndarray
    epsilon: float
    ops: FemOperators

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=complex)
        if u.shape != (self.ops.mesh.n_vertices,):
            raise ValueError("u must have one value per vertex")
        if not np.all(np.isfinite(u)):
            raise ValueError("non-finite field values")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def mesh(self):
        return self.ops.mesh

    def replace(self, u=None, phases=None):
        b = self.bundle if phases is None else LatticeBundle(self.mesh, phases)
        return YMHState(b, self.u if u is None else u, self.epsilon, self.ops)


def make_state(ops, bundle, u, epsilon):
    return YMHState(bundle, np.asarray(u, dtype=complex), float(epsilon), ops)


def _edge_arrays(state):
    e = state.mesh.edges
    return (np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1]),
            np.ascontiguousarray(state.ops.edge_weights))


def energy_parts(state: YMHState):
    """(curvature, covariant Dirichlet, potential) terms of the energy."""
    eps2 = state.epsilon ** 2
    phi = state.bundle.fluxes()
    curv = eps2 * np.sum(phi ** 2 / state.ops.areas)
    ei, ej, w = _edge_arrays(state)
    hop, _, _ = hopping(ei, ej, w, state.bundle.phases, state.u, want_grad=False)
    pot = state.ops.lumped @ ((1 - np.abs(state.u) ** 2) ** 2) / (4 * eps2)
    return float(curv), float(hop), float(pot)


def ymh_energy(state: YMHState) -> float:
    return float(sum(energy_parts(state)))


def ymh_gradient(state: YMHState):
    """Exact gradient: (complex per vertex = dE/dRe u + i dE/dIm u, real per edge)."""
    eps2 = state.epsilon ** 2
    ei, ej, w = _edge_arrays(state)
    _, gu, gt = hopping(ei, ej, w, state.bundle.phases, state.u, want_grad=True)
    u = state.u
    gu = gu + state.ops.lumped * (np.abs(u) ** 2 - 1) * u / eps2
    phi = state.bundle.fluxes()
    m = state.mesh
    coef = 2 * eps2 * phi / state.ops.areas
    gt = gt + np.bincount(m.face_edges.ravel(), weights=(m.face_edge_sign * coef[:, None]).ravel(),
                          minlength=m.n_edges)
    return gu, gt


def gauge_transform(state: YMHState, phi) -> YMHState:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (state.mesh.n_vertices,):
        raise ValueError("gauge function needs one value per vertex")
    e = state.mesh.edges
    theta = state.bundle.phases + phi[e[:, 1]] - phi[e[:, 0]]
    return state.replace(u=np.exp(1j * phi) * state.u, phases=theta)


def coulomb_project(state: YMHState) -> YMHState:
    """Gauge minimizing sum_e w_e theta_e^2 over the orbit (zero-mean gauge function)."""
    d = edge_vertex_matrix(state.mesh)
    W = sp.diags(state.ops.edge_weights)
    lap = (d.T @ W @ d).tocsc()
    rhs = -(d.T @ (state.ops.edge_weights * state.bundle.phases))
    n = lap.shape[0]
    phi = np.zeros(n)
    phi[1:] = sla.spsolve(lap[1:, 1:], rhs[1:])
    phi -= phi.mean()
    return gauge_transform(state, phi)


# ---------------------------------------------------------------- second derivatives
# Real unknowns are ordered [Re u_0, Im u_0, Re u_1, ..., theta_0, ..., theta_{E-1}].

def n_unknowns(state: YMHState) -> int:
    return 2 * state.mesh.n_vertices + state.mesh.n_edges


def pack(du, dtheta):
    du = np.asarray(du, dtype=complex)
    return np.concatenate([np.column_stack([du.real, du.imag]).ravel(), np.asarray(dtheta, dtype=float)])


def unpack(state: YMHState, x):
    nv = state.mesh.n_vertices
    p = np.asarray(x[:2 * nv]).reshape(nv, 2)
    return p[:, 0] + 1j * p[:, 1], np.asarray(x[2 * nv:])


def gradient_vector(state: YMHState):
    gu, gt = ymh_gradient(state)
    return pack(gu, gt)


def ymh_hessian(state: YMHState):
    """Exact Hessian of ymh_energy as a sparse symmetric matrix."""
    m = state.mesh
    nv, ne = m.n_vertices, m.n_edges
    eps2 = state.epsilon ** 2
    ei, ej, w = _edge_arrays(state)
    th = state.bundle.phases
    c, s = np.cos(th), np.sin(th)
    u = state.u
    a = np.column_stack([u[ei].real, u[ei].imag])
    b = np.column_stack([u[ej].real, u[ej].imag])
    R = np.empty((ne, 2, 2))
    R[:, 0, 0], R[:, 0, 1], R[:, 1, 0], R[:, 1, 1] = c, -s, s, c
    dR = np.empty((ne, 2, 2))
    dR[:, 0, 0], dR[:, 0, 1], dR[:, 1, 0], dR[:, 1, 1] = -s, -c, c, -s
    rows, cols, vals = [], [], []

    def block(ri, ci, blk):
        # ri, ci: base row/col per edge, blk (ne, p, q)
        p, q = blk.shape[1:]
        rr = ri[:, None, None] + np.arange(p)[None, :, None]
        cc = ci[:, None, None] + np.arange(q)[None, None, :]
        rows.append(np.broadcast_to(rr, blk.shape).ravel())
        cols.append(np.broadcast_to(cc, blk.shape).ravel())
        vals.append(blk.ravel())

    w2 = 2.0 * w
    eye = np.broadcast_to(np.eye(2), (ne, 2, 2))
    ia, ib, it = 2 * ei, 2 * ej, 2 * nv + np.arange(ne)
    block(ia, ia, w2[:, None, None] * eye)
    block(ib, ib, w2[:, None, None] * eye)
    block(ia, ib, -w2[:, None, None] * np.transpose(R, (0, 2, 1)))
    block(ib, ia, -w2[:, None, None] * R)
    at = -w2[:, None] * np.einsum("eji,ej->ei", dR, b)      # d2/da dtheta
    bt = -w2[:, None] * np.einsum("eij,ej->ei", dR, a)      # d2/db dtheta
    block(ia, it, at[:, :, None])
    block(it, ia, at[:, None, :])
    block(ib, it, bt[:, :, None])
    block(it, ib, bt[:, None, :])
    block(it, it, (w2 * np.einsum("ei,eij,ej->e", b, R, a))[:, None, None])
    # curvature term eps^2 Phi_f^2 / A_f
    sig = m.face_edge_sign.astype(float)
    fe = 2 * nv + m.face_edges
    coef = 2 * eps2 / state.ops.areas
    rows.append(np.repeat(fe, 3, axis=1).ravel())
    cols.append(np.tile(fe, (1, 3)).ravel())
    vals.append((coef[:, None, None] * sig[:, :, None] * sig[:, None, :]).ravel())
    # potential
    mv = state.ops.lumped / eps2
    av = np.column_stack([u.real, u.imag])
    pot = mv[:, None, None] * ((np.abs(u) ** 2 - 1)[:, None, None] * np.eye(2)
                               + 2 * av[:, :, None] * av[:, None, :])
    iv = 2 * np.arange(nv)
    block(iv, iv, pot)
    n = 2 * nv + ne
    H = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    H.sum_duplicates()
    return H


def natural_metric(state: YMHState):
    """Diagonal metric: lumped mass on each real component of u, cotangent weight on edges."""
    ew = state.ops.edge_weights
    if np.any(ew <= 0):
        raise ValueError("non-positive cotangent weight; edge metric undefined on this mesh")
    return sp.diags(np.concatenate([np.repeat(state.ops.lumped, 2), ew])).tocsr()


def gauge_tangent(state: YMHState):
    """Sparse map phi -> (i phi u, d phi): derivative of the gauge action at the identity."""
    m = state.mesh
    nv = m.n_vertices
    u = state.u
    iv = np.arange(nv)
    rows = np.concatenate([2 * iv, 2 * iv + 1])
    cols = np.concatenate([iv, iv])
    vals = np.concatenate([-u.imag, u.real])
    T_u = sp.csr_matrix((vals, (rows, cols)), shape=(2 * nv, nv))
    return sp.vstack([T_u, edge_vertex_matrix(m)]).tocsr()
