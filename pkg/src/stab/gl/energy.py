"""Discrete Ginzburg-Landau energy, residual and second variation.

Complex vertex fields are also viewed as interleaved real pairs
(re_0, im_0, re_1, im_1, ...), which is how the Hessian acts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..geometry import FemOperators


@dataclass(frozen=True)
class GLParams:
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True, eq=False)
class GLState:
    u: np.ndarray
    params: GLParams
    ops: FemOperators

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=complex)
        if u.shape != (self.ops.mesh.n_vertices,):
            raise ValueError(f"u must have {self.ops.mesh.n_vertices} entries, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("non-finite field values")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def epsilon(self):
        return self.params.epsilon

    def with_u(self, u):
        return GLState(u, self.params, self.ops)


def make_state(ops, u, epsilon):
    return GLState(np.asarray(u, dtype=complex), GLParams(float(epsilon)), ops)


def as_pairs(u):
    return np.ascontiguousarray(u, dtype=complex).view(np.float64)


def from_pairs(w):
    return np.ascontiguousarray(w, dtype=np.float64).view(complex)


def _check(state, v):
    v = np.asarray(v, dtype=complex)
    if v.shape != state.u.shape:
        raise ValueError(f"length mismatch: {v.shape} vs {state.u.shape}")
    return v


def mass_inner(state, a, b):
    """<a, b>_mass = sum_i m_i Re(conj(a_i) b_i)."""
    return float(np.sum(state.ops.lumped * np.real(np.conj(a) * b)))


def mass_norm(state, a):
    return float(np.sqrt(mass_inner(state, a, a)))


def potential_density(u, eps):
    return (1.0 - np.abs(u) ** 2) ** 2 / (4.0 * eps * eps)


def gl_energy(state: GLState) -> float:
    """Dirichlet term on faces plus lumped-mass potential."""
    K = state.ops.stiffness
    u = state.u
    dirichlet = 0.5 * (u.real @ (K @ u.real) + u.imag @ (K @ u.imag))
    pot = state.ops.lumped @ potential_density(u, state.epsilon)
    return float(dirichlet + pot)


def gl_gradient(state: GLState):
    """Euclidean gradient of gl_energy w.r.t. the real pairs, as a complex array."""
    u = state.u
    eps2 = state.epsilon ** 2
    return state.ops.stiffness @ u + state.ops.lumped * (np.abs(u) ** 2 - 1.0) * u / eps2


def gl_residual(state: GLState):
    """Mass-inverse gradient r, so <r, v>_mass = dE(u)[v].

    This is the discrete form of -Lap u + (|u|^2 - 1) u / eps^2.
    """
    return gl_gradient(state) / state.ops.lumped


def residual_norm(state: GLState) -> float:
    return mass_norm(state, gl_residual(state))


def gl_hessian_apply(state: GLState, v):
    """L_u v = -Lap v + ((|u|^2 - 1) v + 2 Re(conj(u) v) u) / eps^2 (mass-inverse form)."""
    v = _check(state, v)
    u = state.u
    eps2 = state.epsilon ** 2
    lin = (np.abs(u) ** 2 - 1.0) * v + 2.0 * np.real(np.conj(u) * v) * u
    return (state.ops.stiffness @ v) / state.ops.lumped + lin / eps2


def gl_outer_second_variation(state: GLState, v) -> float:
    """int |grad v|^2 + ((|u|^2 - 1)|v|^2 + 2 (u.v)^2) / eps^2."""
    v = _check(state, v)
    u = state.u
    K = state.ops.stiffness
    grad = v.real @ (K @ v.real) + v.imag @ (K @ v.imag)
    dot = np.real(np.conj(u) * v)
    pot = state.ops.lumped @ ((np.abs(u) ** 2 - 1.0) * np.abs(v) ** 2 + 2.0 * dot ** 2)
    return float(grad + pot / state.epsilon ** 2)


def hessian_matrix(state: GLState):
    """Sparse Hessian of gl_energy on interleaved real pairs (2V x 2V)."""
    u = state.u
    m = state.ops.lumped / state.epsilon ** 2
    a, b = u.real, u.imag
    s = np.abs(u) ** 2 - 1.0
    n = len(u)
    idx = np.arange(n)
    blocks = sp.coo_matrix(
        (np.concatenate([m * (s + 2 * a * a), m * (2 * a * b), m * (2 * a * b), m * (s + 2 * b * b)]),
         (np.concatenate([2 * idx, 2 * idx, 2 * idx + 1, 2 * idx + 1]),
          np.concatenate([2 * idx, 2 * idx + 1, 2 * idx, 2 * idx + 1]))),
        shape=(2 * n, 2 * n))
    H = sp.kron(state.ops.stiffness, sp.identity(2), format="csr") + blocks.tocsr()
    H.sum_duplicates()
    return H.tocsr()


def mass_matrix_pairs(state: GLState):
    return sp.diags(np.repeat(state.ops.lumped, 2)).tocsr()
