"""Lowest eigenpairs of sparse symmetric pencils (H, M) and inertia counts."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8


class EigenSolverError(RuntimeError):
    pass


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray      # columns, M-orthonormal
    residual_norms: np.ndarray
    converged: np.ndarray
    shift: float = 0.0

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("index,eigenvalue,residualNorm\n")
            for i, (lam, r) in enumerate(zip(self.eigenvalues.tolist(), self.residual_norms.tolist())):
                fh.write(f"{i},{lam!r},{r!r}\n")


def factor_symmetric(A):
    """Sparse LU with symmetric ordering and no pivoting, so diag(U) carries the inertia."""
    return sla.splu(sp.csc_matrix(A), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                    options=dict(SymmetricMode=True))


def count_below(H, M, shift):
    """Number of eigenvalues of the pencil (H, M) below `shift` (M positive definite).

    Sylvester's law of inertia applied to an unpivoted symmetric LU of H - shift M.
    """
    lu = factor_symmetric(H - shift * M)
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise EigenSolverError("factorization pivoted; inertia unavailable")
    d = lu.U.diagonal()
    if np.any(d == 0):
        raise EigenSolverError(f"shift {shift} is an eigenvalue")
    return int(np.count_nonzero(d < 0))


def residual_norms(H, M, lam, V):
    R = H @ V - (M @ V) * lam
    return np.linalg.norm(R, axis=0) / np.linalg.norm(M @ V, axis=0)


def lowest_eigenpairs(H, M, k, lower_bound, seed=0, tol=RESIDUAL_TOL, maxiter=None):
    """k smallest eigenpairs of H v = lam M v by shift-invert Lanczos.

    The shift starts at `lower_bound` - 1 and is pushed down until an
    inertia count certifies it lies below the whole spectrum, so the
    eigenvalues nearest the shift are the lowest ones.
    """
    H = sp.csr_matrix(H)
    M = sp.csr_matrix(M)
    n = H.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, {n - 1}]")
    sigma = float(lower_bound) - 1.0
    for _ in range(20):
        if count_below(H, M, sigma) == 0:
            break
        sigma = sigma - 2.0 * abs(sigma) - 1.0
    else:
        raise EigenSolverError("could not place the shift below the spectrum")
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    lu = factor_symmetric(H - sigma * M)
    op = sla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
    ncv = min(n - 1, max(4, 2 * k + 1, k + 16))
    try:
        mu, V = sla.eigsh(H, k=k, M=M, sigma=sigma, which="LM", OPinv=op, v0=v0,
                          ncv=ncv, tol=0.0, maxiter=maxiter)
    except sla.ArpackNoConvergence as exc:
        raise EigenSolverError(str(exc)) from exc
    order = np.argsort(mu, kind="stable")
    mu, V = mu[order], V[:, order]
    # Rayleigh-Ritz on the returned block cleans up near-degenerate clusters
    Hs = V.T @ (H @ V)
    Ms = V.T @ (M @ V)
    mu, C = la.eigh(0.5 * (Hs + Hs.T), 0.5 * (Ms + Ms.T))
    V = V @ C
    res = residual_norms(H, M, mu, V)
    converged = res <= tol
    if not converged.all():
        log.warning("eigenpairs above residual tolerance: %s", res[~converged])
    return SpectrumReport(mu, V, res, converged, sigma)
