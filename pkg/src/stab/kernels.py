"""Hot loops with a numba implementation and a numpy twin.

The public wrappers dispatch on stab._backend.USE_NUMBA.  Both versions do
the same arithmetic in the same order where it matters for ties, so they
agree bit-for-bit on point location and to rounding elsewhere.
"""
from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, njit

LOCATE_TOL = 1e-12


class PointLocationError(RuntimeError):
    pass


# ---------------------------------------------------------------- point location

@njit
def _bary(C, f, y, out):
    s = 0.0
    for k in range(3):
        v = C[f, k, 0] * y[0] + C[f, k, 1] * y[1] + C[f, k, 2] * y[2]
        out[k] = v
        s += v
    if s <= 0.0:
        return False
    for k in range(3):
        out[k] /= s
    return True


@njit
def _locate_nb(C, adj, faces, vf_ptr, vf_idx, pts, seeds, max_steps, tol):
    n = pts.shape[0]
    nf = C.shape[0]
    res_f = np.empty(n, dtype=np.int64)
    res_b = np.empty((n, 3))
    lam = np.empty(3)
    lam2 = np.empty(3)
    for p in range(n):
        y = pts[p]
        f = seeds[p]
        found = -1
        for _ in range(max_steps):
            ok = _bary(C, f, y, lam)
            kmin = 0
            for k in range(1, 3):
                if lam[k] < lam[kmin]:
                    kmin = k
            if ok and lam[kmin] >= -tol:
                found = f
                break
            f = adj[f, kmin]
        if found < 0:
            # exhaustive scan, lowest index first
            for g in range(nf):
                if _bary(C, g, y, lam) and min(lam[0], min(lam[1], lam[2])) >= -tol:
                    found = g
                    break
            if found < 0:
                res_f[p] = -1
                continue
            _bary(C, found, y, lam)
        if min(lam[0], min(lam[1], lam[2])) <= tol:
            # on an edge or vertex: take the lowest-index face that contains y
            best = found
            for k in range(3):
                v = faces[found, k]
                for q in range(vf_ptr[v], vf_ptr[v + 1]):
                    g = vf_idx[q]
                    if g < best and _bary(C, g, y, lam2):
                        if min(lam2[0], min(lam2[1], lam2[2])) >= -tol:
                            best = g
            found = best
            _bary(C, found, y, lam)
        res_f[p] = found
        for k in range(3):
            res_b[p, k] = lam[k]
    return res_f, res_b


def _bary_np(C, f, y):
    lam = np.einsum("nkj,nj->nk", C[f], y)
    s = lam[:, 0] + lam[:, 1] + lam[:, 2]
    ok = s > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = lam / np.where(ok, s, 1.0)[:, None]
    return ok, lam


def _min3(lam):
    return np.minimum(lam[:, 0], np.minimum(lam[:, 1], lam[:, 2]))


def _locate_np(C, adj, faces, vf_ptr, vf_idx, pts, seeds, max_steps, tol):
    n = len(pts)
    f = seeds.astype(np.int64).copy()
    done = np.zeros(n, dtype=bool)
    for _ in range(max_steps):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        ok, lam = _bary_np(C, f[act], pts[act])
        kmin = np.argmin(lam, axis=1)
        inside = ok & (lam[np.arange(act.size), kmin] >= -tol)
        done[act[inside]] = True
        mv = act[~inside]
        f[mv] = adj[f[mv], kmin[~inside]]
    res_f = np.where(done, f, -1)
    for p in np.flatnonzero(~done):
        ok, lam = _bary_np(C, np.arange(len(C)), np.broadcast_to(pts[p], (len(C), 3)))
        hit = np.flatnonzero(ok & (_min3(lam) >= -tol))
        res_f[p] = hit[0] if hit.size else -1
    good = res_f >= 0
    _, lam = _bary_np(C, np.where(good, res_f, 0), pts)
    edge = good & (_min3(lam) <= tol)
    for p in np.flatnonzero(edge):
        best = res_f[p]
        cand = np.unique(np.concatenate([vf_idx[vf_ptr[v]:vf_ptr[v + 1]] for v in faces[best]]))
        cand = cand[cand < best]
        if cand.size:
            ok, l2 = _bary_np(C, cand, np.broadcast_to(pts[p], (cand.size, 3)))
            hit = cand[ok & (_min3(l2) >= -tol)]
            if hit.size:
                best = hit.min()
        res_f[p] = best
    _, lam = _bary_np(C, np.where(good, res_f, 0), pts)
    return res_f, lam


def locate_points(C, adj, faces, vf_ptr, vf_idx, pts, seeds, max_steps=None,
                  tol=LOCATE_TOL, use_numba=None):
    """Face index and barycentric coordinates of the ray through each point.

    C[f, k] = p_{k+1} x p_{k+2} for face corners p; the ray through y hits
    face f with barycentrics proportional to C[f] @ y.
    """
    pts = np.ascontiguousarray(pts, dtype=float)
    seeds = np.ascontiguousarray(seeds, dtype=np.int64)
    if max_steps is None:
        max_steps = 4 * int(np.sqrt(len(C))) + 64
    fn = _locate_nb if (USE_NUMBA if use_numba is None else use_numba) else _locate_np
    f, lam = fn(C, adj, faces, vf_ptr, vf_idx, pts, seeds, max_steps, tol)
    if np.any(f < 0):
        bad = int(np.flatnonzero(f < 0)[0])
        raise PointLocationError(f"no face contains query point {bad}: {pts[bad]}")
    return f, lam


# ---------------------------------------------------------------- lattice hopping term

@njit
def _hop_nb(ei, ej, w, theta, ur, ui, want_grad):
    ne = ei.shape[0]
    nv = ur.shape[0]
    gr = np.zeros(nv)
    gi = np.zeros(nv)
    gt = np.zeros(ne)
    total = 0.0
    for e in range(ne):
        i = ei[e]
        j = ej[e]
        c = np.cos(theta[e])
        s = np.sin(theta[e])
        # U u_i
        tr = c * ur[i] - s * ui[i]
        ti = s * ur[i] + c * ui[i]
        dr = ur[j] - tr
        di = ui[j] - ti
        total += w[e] * (dr * dr + di * di)
        if want_grad:
            gr[j] += 2.0 * w[e] * dr
            gi[j] += 2.0 * w[e] * di
            # conj(U) (u_j - U u_i) = conj(U) u_j - u_i, negated
            br = c * dr + s * di
            bi = -s * dr + c * di
            gr[i] -= 2.0 * w[e] * br
            gi[i] -= 2.0 * w[e] * bi
            # d/dtheta = 2 w Im(conj(u_j) U u_i)
            gt[e] = 2.0 * w[e] * (ur[j] * ti - ui[j] * tr)
    return total, gr, gi, gt


def _hop_np(ei, ej, w, theta, ur, ui, want_grad):
    nv = ur.shape[0]
    U = np.exp(1j * theta)
    u = ur + 1j * ui
    tu = U * u[ei]
    d = u[ej] - tu
    total = float(np.sum(w * (d.real ** 2 + d.imag ** 2)))
    if not want_grad:
        return total, None, None, None
    gj = 2.0 * w * d
    gi_ = -2.0 * w * np.conj(U) * d
    g = (np.bincount(ej, weights=gj.real, minlength=nv) + np.bincount(ei, weights=gi_.real, minlength=nv)
         + 1j * (np.bincount(ej, weights=gj.imag, minlength=nv) + np.bincount(ei, weights=gi_.imag, minlength=nv)))
    gt = 2.0 * w * np.imag(np.conj(u[ej]) * tu)
    return total, g.real.copy(), g.imag.copy(), gt


def hopping(ei, ej, w, theta, u, want_grad=True, use_numba=None):
    """sum_e w_e |u_j - e^{i theta_e} u_i|^2 and its gradient (complex per vertex, real per edge)."""
    fn = _hop_nb if (USE_NUMBA if use_numba is None else use_numba) else _hop_np
    u = np.ascontiguousarray(u, dtype=complex)
    total, gr, gi, gt = fn(ei, ej, w, np.ascontiguousarray(theta, dtype=float),
                           np.ascontiguousarray(u.real), np.ascontiguousarray(u.imag), want_grad)
    if not want_grad:
        return total, None, None
    return total, gr + 1j * gi, gt
