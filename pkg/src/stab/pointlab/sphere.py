"""Trace identities for conformal fields on S^n, checked sample by sample."""
from __future__ import annotations

import numpy as np

from ..geometry import conformal_field_jet, sphere_curvature
from .frames import PointFrame, random_field_data, sphere_point
from .integrands import gl_integrand, norm_F_sq, ymh_integrand


def conformal_tensors(frame: PointFrame, xi):
    """(A, ric, Rxx, X) for X_xi at the frame's point, from the field jet and curvature callback."""
    jet = conformal_field_jet(xi, frame.n)
    x = frame.point
    E = frame.frame
    X = jet.x(x)
    A = E @ jet.grad(x).T @ E.T          # A[i, j] = <nabla_{e_i} X, e_j>
    Rxx = np.array([[frame.curvature(ei, X, X, ej) for ej in E] for ei in E])
    ric = float(np.trace(Rxx))
    return A, ric, Rxx, X


def _frame(n, rng, seed):
    x, E = sphere_point(n, rng)
    return PointFrame(n, x, E, sphere_curvature, random_field_data(n, rng), seed)


def _samples(n, samples, seed):
    if n < 2:
        raise ValueError("n must be at least 2")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    return [_frame(n, rng, seed) for _ in range(samples)]


def gl_trace_sum(frame: PointFrame):
    d = frame.data
    total = 0.0
    for xi in np.eye(frame.n + 1):
        A, ric, Rxx, _ = conformal_tensors(frame, xi)
        total += gl_integrand(d.e_eps, d.grad_u, A, ric, Rxx)
    return total


def sphere_gl_trace(n, samples, seed):
    """max |sum_xi integrand + (n - 2)|grad u|^2| over samples, with per-sample scales."""
    rows = []
    for fr in _samples(n, samples, seed):
        d = fr.data
        g2 = float(np.sum(d.grad_u ** 2))
        s = gl_trace_sum(fr)
        rows.append({"sum": s, "target": -(n - 2) * g2, "deviation": abs(s + (n - 2) * g2),
                     "scale": 1.0 + g2 + d.e_eps})
    return {"maxAbsDeviation": max(r["deviation"] for r in rows),
            "maxRelDeviation": max(r["deviation"] / r["scale"] for r in rows),
            "perSample": rows}


def ymh_trace_sum(frame: PointFrame):
    d = frame.data
    total = 0.0
    for xi in np.eye(frame.n + 1):
        A, ric, Rxx, _ = conformal_tensors(frame, xi)
        total += ymh_integrand(d.e_eps, d.F, d.Du, d.epsilon, A, ric, Rxx)
    return total


def ymh_trace_target(n, data):
    du2 = float(np.sum(np.abs(data.Du) ** 2))
    return 4 * (4 - n) * data.epsilon ** 2 * norm_F_sq(data.F) + 2 * (2 - n) * du2


def sphere_ymh_trace(n, samples, seed, zero_F=False, zero_Du=False):
    rows = []
    for fr in _samples(n, samples, seed):
        d = fr.data
        if zero_F:
            d.F = np.zeros_like(d.F)
        if zero_Du:
            d.Du = np.zeros_like(d.Du)
        s = ymh_trace_sum(fr)
        t = ymh_trace_target(n, d)
        scale = 1.0 + d.e_eps + d.epsilon ** 2 * norm_F_sq(d.F) + float(np.sum(np.abs(d.Du) ** 2))
        rows.append({"sum": s, "target": t, "deviation": abs(s - t), "scale": scale})
    return {"maxAbsDeviation": max(r["deviation"] for r in rows),
            "maxRelDeviation": max(r["deviation"] / r["scale"] for r in rows),
            "perSample": rows}
