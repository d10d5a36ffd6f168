"""Critical points of the GL energy: gradient flow, then globalized Newton."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .energy import (GLState, as_pairs, from_pairs, gl_energy, gl_gradient, hessian_matrix,
                     residual_norm)

log = logging.getLogger(__name__)


class LineSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class Schedule:
    flow_steps: int = 400
    flow_step: float = 0.05
    newton_tol: float = 1e-10
    newton_max_iter: int = 40
    line_search: bool = True
    switch_tol: float = 1e-2

    def __post_init__(self):
        if self.flow_steps < 0 or self.newton_max_iter < 0:
            raise ValueError("iteration counts must be nonnegative")
        if not (self.flow_step > 0 and self.newton_tol > 0 and self.switch_tol > 0):
            raise ValueError("step sizes and tolerances must be positive")


@dataclass
class SolveLog:
    energies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    phases: list = field(default_factory=list)
    converged: bool = False
    message: str = ""

    def record(self, phase, state):
        self.phases.append(phase)
        self.energies.append(gl_energy(state))
        self.residuals.append(residual_norm(state))


def _flow(state, sched, slog):
    ops = state.ops
    eps2 = state.epsilon ** 2
    m = ops.lumped
    stab = 2.0 / eps2
    tau = sched.flow_step
    lu = None
    u = state.u.copy()
    E = slog.energies[-1]
    for _ in range(sched.flow_steps):
        if slog.residuals[-1] < sched.switch_tol:
            break
        for _halve in range(40):
            if lu is None:
                A = sp.diags(m * (1.0 + tau * stab)) + tau * ops.stiffness
                lu = sla.splu(sp.csc_matrix(A))
            rhs = m * ((1.0 + tau * stab) * u - tau * (np.abs(u) ** 2 - 1.0) * u / eps2)
            new = lu.solve(rhs.real) + 1j * lu.solve(rhs.imag)
            cand = state.with_u(new)
            En = gl_energy(cand)
            if En <= E + 1e-12 * max(1.0, abs(E)):
                break
            tau *= 0.5
            lu = None
        else:
            slog.message = "flow step underflow"
            return state
        u, E, state = new, En, cand
        slog.record("flow", state)
    return state


def _newton_step(state):
    H = hessian_matrix(state)
    g = as_pairs(gl_gradient(state))
    n = H.shape[0]
    # border with the global phase direction, an exact symmetry of the energy
    w = as_pairs(1j * state.u * state.ops.lumped)
    nw = np.linalg.norm(w)
    if nw > 1e-12:
        w = w / nw
        A = sp.bmat([[H, sp.csr_matrix(w[:, None])], [sp.csr_matrix(w[None, :]), None]], format="csc")
        rhs = np.concatenate([-g, [0.0]])
        sol = sla.splu(A).solve(rhs)[:n]
    else:
        sol = sla.splu(sp.csc_matrix(H)).solve(-g)
    return from_pairs(sol)


def gl_solve(state: GLState, schedule: Schedule | None = None):
    """Flow until the residual drops below switch_tol, then Newton to newton_tol.

    Returns (state, SolveLog).  Non-convergence is reported in the log.
    """
    sched = schedule or Schedule()
    slog = SolveLog()
    slog.record("start", state)
    state = _flow(state, sched, slog)
    r = slog.residuals[-1]
    for it in range(sched.newton_max_iter):
        if r <= sched.newton_tol:
            break
        try:
            d = _newton_step(state)
        except RuntimeError as exc:  # singular factorization
            slog.message = f"newton linear solve failed: {exc}"
            break
        alpha = 1.0
        while True:
            cand = state.with_u(state.u + alpha * d)
            rc = residual_norm(cand)
            if not sched.line_search or rc < (1.0 - 1e-4 * alpha) * r:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                slog.message = "line search failed"
                slog.converged = False
                return state, slog
        state, r = cand, rc
        slog.record("newton", state)
    slog.converged = r <= sched.newton_tol
    if not slog.converged and not slog.message:
        slog.message = "newton iteration limit"
    return state, slog
