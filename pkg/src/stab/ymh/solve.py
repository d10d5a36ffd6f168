"""Energy minimization for lattice YMH states.

Stage one is preconditioned gradient descent with Barzilai-Borwein steps and
monotone Armijo backtracking. Stage two polishes with Newton steps on the
gauge-penalized Hessian. Every accepted step keeps each plaquette flux
strictly inside (-pi, pi) along the straight path, so the degree never changes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from ..spectral import EigenSolverError, factor_symmetric, lowest_eigenpairs
from .lattice import (YMHState, face_edge_matrix, gauge_tangent, gradient_vector, natural_metric,
                      unpack, ymh_degree, ymh_energy, ymh_hessian)

log = logging.getLogger(__name__)

FLUX_MARGIN = 1e-6


@dataclass
class YMHSchedule:
    tol: float = 1e-9
    max_iter: int = 4000
    newton_switch: float = 1e-3
    newton_max_iter: int = 30
    armijo: float = 1e-4


@dataclass
class YMHLog:
    energies: list = field(default_factory=list)
    gradient_norms: list = field(default_factory=list)
    degrees: list = field(default_factory=list)
    phases: list = field(default_factory=list)
    converged: bool = False
    message: str = ""

    def record(self, E, g, d, phase):
        self.energies.append(float(E))
        self.gradient_norms.append(float(g))
        self.degrees.append(int(d))
        self.phases.append(phase)


def gradient_norm(state: YMHState, g=None):
    """Dual norm of the gradient in the natural metric."""
    if g is None:
        g = gradient_vector(state)
    p = natural_metric(state).diagonal()
    return float(np.sqrt(np.dot(g, g / p)))


def _preconditioner(state: YMHState):
    ops = state.ops
    eps2 = state.epsilon ** 2
    Ku = sp.kron(2.0 * ops.stiffness + sp.diags(2.0 * ops.lumped / eps2), sp.identity(2))
    d1 = face_edge_matrix(state.mesh)
    Kt = 2 * eps2 * d1.T @ sp.diags(1.0 / ops.areas) @ d1 + sp.diags(2.0 * ops.edge_weights)
    S = sp.block_diag([Ku, Kt]).tocsc()
    return S, sla.splu(S)


def _flux_ok(state: YMHState, dtheta, d1):
    new = state.bundle.fluxes() + d1 @ dtheta
    return bool(np.max(np.abs(new)) < np.pi - FLUX_MARGIN)


def _step(state, x, t):
    du, dt = unpack(state, x)
    return state.replace(u=state.u + t * du, phases=state.bundle.phases + t * dt)


def gauge_penalty(state: YMHState, sigma: float):
    """sigma * P T M^-1 T^T P: vanishes on the metric complement of the gauge orbit."""
    P = natural_metric(state)
    PT = P @ gauge_tangent(state)
    return sigma * (PT @ sp.diags(1.0 / state.ops.lumped) @ PT.T)


def _newton(state, g, sigma, seed=0):
    """Newton direction on the gauge-penalized Hessian, shifted when not positive definite.

    Lattice vortices have near-zero translation modes whose sign depends on
    where the core sits relative to the mesh; a small negative one makes the
    plain Newton step head for the saddle, so the pencil is shifted to be
    positive definite and the negative-curvature direction is added.
    """
    H = (ymh_hessian(state) + gauge_penalty(state, sigma)).tocsc()
    P = natural_metric(state)
    try:
        lu = factor_symmetric(H)
        if np.array_equal(lu.perm_r, lu.perm_c) and np.all(lu.U.diagonal() > 0):
            return -lu.solve(g)
    except RuntimeError:
        pass
    try:
        rep = lowest_eigenpairs(H, P, 1, -1.0 / state.epsilon ** 2, seed=seed)
    except EigenSolverError:
        return None
    lam, v = float(rep.eigenvalues[0]), rep.eigenvectors[:, 0]
    floor = 1e-8 * (1.0 + 1.0 / state.epsilon ** 2)
    mu = 0.0 if lam > floor else 2.0 * abs(lam) + floor
    try:
        d = -factor_symmetric((H + mu * P).tocsc()).solve(g)
    except RuntimeError:
        return None
    if lam < -floor:
        vg = float(np.dot(v, g))
        d = d - np.copysign(1.0, vg if vg != 0 else 1.0) * v * np.sqrt(abs(lam)) * 0.1
    return d


def ymh_solve(state: YMHState, schedule: YMHSchedule | None = None):
    sch = schedule or YMHSchedule()
    logbook = YMHLog()
    d1 = face_edge_matrix(state.mesh)
    deg0 = ymh_degree(state.bundle)
    S, lu = _preconditioner(state)
    E = ymh_energy(state)
    g = gradient_vector(state)
    gn = gradient_norm(state, g)
    logbook.record(E, gn, deg0, "start")
    sigma = 4.0 * (1.0 + 1.0 / state.epsilon ** 2)
    prev = None
    phase = "descent"
    for it in range(sch.max_iter):
        if gn <= sch.tol:
            logbook.converged = True
            break
        newton_dir = None
        if gn <= sch.newton_switch:
            phase = "newton"
            newton_dir = _newton(state, g, sigma)
        if newton_dir is not None and np.dot(newton_dir, g) < 0:
            d = newton_dir
            t = 1.0
        else:
            d = -lu.solve(g)
            if prev is None:
                t = 1.0
            else:
                s, y = prev
                sy = np.dot(s, y)
                t = np.dot(s, S @ s) / sy if sy > 0 else 1.0
                t = float(np.clip(t, 1e-6, 1e3))
        slope = float(np.dot(g, d))
        if slope >= 0:
            logbook.message = "no descent direction"
            break
        accepted = False
        for _ in range(60):
            _, dt = unpack(state, d)
            if _flux_ok(state, t * dt, d1):
                trial = _step(state, d, t)
                Et = ymh_energy(trial)
                if Et <= E + sch.armijo * t * slope:
                    accepted = True
                    break
                # near convergence roundoff can mask the Armijo decrease
                if newton_dir is not None and Et <= E + 1e-13 * (1 + abs(E)):
                    gt = gradient_vector(trial)
                    if gradient_norm(trial, gt) < gn:
                        accepted = True
                        break
            t *= 0.5
        if not accepted:
            if newton_dir is not None:
                sigma *= 4.0
                continue
            logbook.message = "line search failed"
            break
        g_new = gradient_vector(trial)
        prev = (t * d, g_new - g)
        state, E, g = trial, Et, g_new
        gn = gradient_norm(state, g)
        logbook.record(E, gn, ymh_degree(state.bundle), phase)
    else:
        logbook.message = "iteration limit"
    if gn <= sch.tol:
        logbook.converged = True
        logbook.message = logbook.message or "converged"
    if ymh_degree(state.bundle) != deg0:
        raise AssertionError("degree changed during minimization")
    log.info("ymh_solve: E=%.12g |g|=%.3g iters=%d %s", E, gn, len(logbook.energies) - 1, logbook.message)
    return state, logbook
