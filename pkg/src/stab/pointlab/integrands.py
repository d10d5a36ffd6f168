"""Pointwise second inner variation integrands evaluated from generic tensors.

All inputs are expressed in an orthonormal frame e_1..e_n at the point:
  A[i, j] = <nabla_{e_i} X, e_j>,  X the field value,
  Rxx[i, j] = <R_{e_i, X} X, e_j>, ric = Ric(X, X),
  N[i, j] = <nabla_{e_i} (nabla_X X), e_j> (optional second-order data).
"""
from __future__ import annotations

import numpy as np


def lie_g(A):
    return A + A.T


def gl_q_terms(grad_u, A, ric, Rxx, N=None):
    """(Q1, Q2, Q3) for a complex u with frame gradient grad_u (n x 2).

    With N omitted the two terms carrying nabla(nabla_X X) are dropped, which
    is the form that remains after using the first variation at a critical point.
    """
    div = np.trace(A)
    q1 = div ** 2 - ric - np.sum(A * A.T)
    if N is not None:
        q1 += np.trace(N)
    L = lie_g(A)
    q2 = 0.0
    q3 = 0.0
    for c in range(grad_u.shape[1]):
        g = grad_u[:, c]
        ag = A.T @ g          # components of nabla_g X
        q2 += 2.0 * np.dot(ag, g) * div - g @ Rxx @ g + np.dot(ag, ag)
        if N is not None:
            q2 += g @ N.T @ g
        lg = L @ g
        q3 += np.dot(lg, lg)
    return q1, q2, q3


def gl_integrand(e_eps, grad_u, A, ric, Rxx, N=None):
    """e Q1 - Q2 + Q3."""
    q1, q2, q3 = gl_q_terms(grad_u, A, ric, Rxx, N)
    return e_eps * q1 - q2 + q3


def ymh_stress(F, Du, epsilon):
    """T_ij = eps^2 F_ik F_jk + Re<D_i u, D_j u> (leading batch axes allowed)."""
    return (epsilon ** 2 * np.einsum("...ik,...jk->...ij", F, F)
            + np.real(np.einsum("...i,...j->...ij", Du, np.conj(Du))))


def ymh_integrand(e_eps, F, Du, epsilon, A, ric, Rxx):
    """Right side of the YMH inner stability inequality at a point (or a batch of points)."""
    div = np.trace(A, axis1=-2, axis2=-1)
    T = ymh_stress(F, Du, epsilon)
    L = A + np.swapaxes(A, -1, -2)
    AAt = np.einsum("...ik,...jk->...ij", A, A)
    t1 = e_eps * (div ** 2 - ric - np.einsum("...ij,...ji->...", A, A))
    t2 = -4.0 * div * np.einsum("...ij,...ij->...", A, T)
    t3 = 2.0 * np.einsum("...ij,...ij->...", Rxx - AAt, T)
    t4 = epsilon ** 2 * np.einsum("...ij,...kl,...ik,...jl->...", L, L, F, F)
    t5 = 2.0 * np.einsum("...il,...jl,...ij->...", L, L, T)
    return t1 + t2 + t3 + t4 + t5


def norm_F_sq(F):
    """|F|^2 = 1/2 sum_ik F_ik^2."""
    return 0.5 * float(np.sum(F * F))
