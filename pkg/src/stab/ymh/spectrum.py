"""Stability of lattice YMH states modulo gauge."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from ..spectral import EigenSolverError, SpectrumReport, lowest_eigenpairs, residual_norms
from .lattice import (LatticeBundle, YMHState, gauge_tangent, make_state, natural_metric, pack,
                      ymh_hessian)
from .solve import gauge_penalty

GAUGE_LEAK_TOL = 1e-6


def gauge_leak(state: YMHState, V):
    """|T^T P v| / (|T| |v|_P) per column: zero on the metric complement of the gauge orbit."""
    P = natural_metric(state)
    T = gauge_tangent(state)
    PV = P @ V
    num = np.linalg.norm(T.T @ PV, axis=0)
    den = sla.norm(T.T @ P) * np.sqrt(np.einsum("ij,ij->j", V, PV))
    return num / den


def operator_norm(state: YMHState, H=None, seed=0) -> float:
    """Largest |eigenvalue| of the pencil (H, natural metric)."""
    H = ymh_hessian(state) if H is None else H
    p = natural_metric(state).diagonal()
    s = sp.diags(1.0 / np.sqrt(p))
    A = s @ H @ s
    v0 = np.random.default_rng(seed).standard_normal(A.shape[0])
    lam = sla.eigsh(A, k=1, which="LM", v0=v0, return_eigenvectors=False, tol=1e-8)
    return float(abs(lam[0]))


def ymh_spectrum_gauge_fixed(state: YMHState, k: int, seed: int = 0, sigma=None) -> SpectrumReport:
    """k lowest eigenpairs of the Hessian on the metric complement of the gauge orbit.

    A penalty sigma P T M^-1 T^T P lifts the gauge directions; sigma is raised
    until none of the returned vectors has a gauge component.
    """
    n = 2 * state.mesh.n_vertices + state.mesh.n_edges
    if not 1 <= k < n - state.mesh.n_vertices:
        raise ValueError("k out of range")
    H = ymh_hessian(state)
    P = natural_metric(state)
    lower = -1.0 / state.epsilon ** 2
    sig = 4.0 * (1.0 + 1.0 / state.epsilon ** 2) if sigma is None else float(sigma)
    for _ in range(8):
        rep = lowest_eigenpairs(H + gauge_penalty(state, sig), P, k, lower, seed=seed)
        leak = gauge_leak(state, rep.eigenvectors)
        if np.all(leak < GAUGE_LEAK_TOL):
            res = residual_norms(H, P, rep.eigenvalues, rep.eigenvectors)
            return SpectrumReport(rep.eigenvalues, rep.eigenvectors, res, rep.converged, rep.shift)
        sig *= 10.0
    raise EigenSolverError("gauge directions persist in the low spectrum")


@dataclass
class TrivialPairCertificate:
    rayleigh_quotient: float
    expected: float
    direction: np.ndarray
    lambda1: float


def trivial_pair(ops, epsilon) -> YMHState:
    """u = 0 with the flat connection on the trivial bundle."""
    m = ops.mesh
    return make_state(ops, LatticeBundle(m, np.zeros(m.n_edges)), np.zeros(m.n_vertices), epsilon)


def trivial_pair_certificate(ops, epsilon, seed: int = 0) -> TrivialPairCertificate:
    """Rayleigh quotient of the constant section direction at (0, flat); the continuum value is -1/eps^2."""
    st = trivial_pair(ops, epsilon)
    H = ymh_hessian(st)
    P = natural_metric(st)
    x = pack(np.ones(st.mesh.n_vertices), np.zeros(st.mesh.n_edges))
    q = float(x @ (H @ x)) / float(x @ (P @ x))
    lam1 = float(ymh_spectrum_gauge_fixed(st, 1, seed=seed).eigenvalues[0])
    return TrivialPairCertificate(q, -1.0 / epsilon ** 2, x, lam1)
