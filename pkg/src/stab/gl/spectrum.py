"""Spectra, Morse index and instability certificates for GL critical points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ..geometry import conformal_field_jet, gradient_field
from ..spectral import EigenSolverError, SpectrumReport, count_below, lowest_eigenpairs
from .energy import GLState, as_pairs, from_pairs, hessian_matrix, mass_matrix_pairs


def gl_spectrum(state: GLState, k: int, seed: int = 0) -> SpectrumReport:
    """k lowest eigenpairs of (Hessian, mass) on the 2V real unknowns."""
    n = 2 * state.ops.mesh.n_vertices
    if not 1 <= k <= n // 2:
        raise ValueError(f"k must be in [1, {n // 2}]")
    H = hessian_matrix(state)
    M = mass_matrix_pairs(state)
    # L_u >= -Lap - 1/eps^2 >= -1/eps^2
    return lowest_eigenpairs(H, M, k, -1.0 / state.epsilon ** 2, seed=seed)


@dataclass
class MorseIndex:
    index: int
    eigenvalues: np.ndarray
    certified: bool


def gl_morse_index(state: GLState, tol: float = 1e-8, seed: int = 0) -> MorseIndex:
    """Eigenvalues below -tol on the real space W^{1,2}(S^2; R^2), with multiplicity.

    The count comes from an inertia computation; the eigensolver then checks
    that exactly that many computed eigenvalues lie below -tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    H = hessian_matrix(state)
    M = mass_matrix_pairs(state)
    idx = count_below(H, M, -tol)
    k = min(idx + 1, H.shape[0] // 2)
    rep = lowest_eigenpairs(H, M, k, -1.0 / state.epsilon ** 2, seed=seed)
    lam = rep.eigenvalues
    ok = int(np.count_nonzero(lam < -tol)) == idx and (idx == k or lam[idx] >= -tol)
    if not ok:
        raise EigenSolverError(f"inertia count {idx} disagrees with eigenvalues {lam}")
    return MorseIndex(idx, lam, bool(ok and rep.converged.all()))


def conformal_directions(state: GLState):
    """v_i = <grad u, X_{e_i}> at the vertices, i = 1, 2, 3 (complex, V x 3)."""
    g = gradient_field(state.ops, state.u, vertex=True)
    x = state.ops.mesh.vertices
    out = np.empty((len(x), 3), dtype=complex)
    for i in range(3):
        X = conformal_field_jet(np.eye(3)[i]).x(x)
        out[:, i] = np.einsum("vd,vd->v", g, X)
    return out


@dataclass
class Certificate:
    found: bool
    direction: np.ndarray | None
    rayleigh_quotient: float
    source: str
    span_second_variations: np.ndarray   # delta^2 E(v_i, v_i) for the three conformal directions
    lambda1: float | None = None


def _rayleigh_min(H, M, vecs, rel=1e-12):
    A = vecs.T @ (H @ vecs)
    B = vecs.T @ (M @ vecs)
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    bw, bv = la.eigh(B)
    keep = bw > rel * max(bw.max(), 0.0)
    if not keep.any():
        return None, np.inf
    T = bv[:, keep] / np.sqrt(bw[keep])
    w, c = la.eigh(T.T @ A @ T)
    return vecs @ (T @ c[:, 0]), float(w[0])


def gl_instability_certificate(state: GLState, tol: float = 1e-8, seed: int = 0) -> Certificate:
    """Negative direction of the second variation, searched in the conformal span first."""
    H = hessian_matrix(state)
    M = mass_matrix_pairs(state)
    V = conformal_directions(state)
    pairs = np.stack([as_pairs(V[:, i]) for i in range(3)], axis=1)
    diag = np.einsum("ni,ni->i", pairs, H @ pairs)
    d, q = _rayleigh_min(H, M, pairs)
    if d is not None and q < -tol:
        return Certificate(True, from_pairs(d), q, "conformal-span", diag)
    rep = gl_spectrum(state, 1, seed=seed)
    lam1 = float(rep.eigenvalues[0])
    if lam1 < -tol:
        return Certificate(True, from_pairs(np.ascontiguousarray(rep.eigenvectors[:, 0])), lam1,
                           "spectrum", diag, lam1)
    return Certificate(False, None, lam1, "none", diag, lam1)
