"""Fubini-Study geometry of CP^n in the affine chart z -> [1 : z], real coordinates (x, y).

Metric: <d/dz_i, d/dzbar_j> = 2((1 + |z|^2) delta_ij - zbar_i z_j) / (1 + |z|^2)^2, so
g(X_i, X_j) = g(Y_i, Y_j) = 2 Re h_ij and g(X_i, Y_j) = 2 Im h_ij.  Derivatives of the
metric are numeric; Killing fields of su(n+1) have closed-form jets in the chart.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .integrands import gl_q_terms
from .numdiff import derivative, scalar_derivative

MAX_N = 3


class FrameError(RuntimeError):
    pass


def _z(r, n):
    return r[:n] + 1j * r[n:]


def chart_metric(r, n):
    z = _z(np.asarray(r, dtype=float), n)
    s = 1.0 + np.vdot(z, z).real
    h = 2.0 / s ** 2 * (s * np.eye(n) - np.outer(np.conj(z), z))
    g = np.empty((2 * n, 2 * n))
    g[:n, :n] = g[n:, n:] = 2 * h.real
    g[:n, n:] = 2 * h.imag
    g[n:, :n] = 2 * h.imag.T
    return g


def complex_structure(n):
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    return J


def su_basis(n):
    """Basis of su(n+1), orthonormal for (A, B) = 2 tr(A B^*)."""
    N = n + 1
    out = []
    for j in range(N):
        for k in range(j + 1, N):
            A = np.zeros((N, N), dtype=complex)
            A[j, k], A[k, j] = 0.5, -0.5
            out.append(A)
            B = np.zeros((N, N), dtype=complex)
            B[j, k] = B[k, j] = 0.5j
            out.append(B)
    for m in range(1, N):
        d = np.zeros(N)
        d[:m] = 1.0
        d[m] = -m
        out.append(np.diag(1j * d / np.sqrt(2 * m * (m + 1))))
    return out


def killing_form(A, B):
    return 2.0 * np.trace(A @ B.conj().T).real


def killing_jet(A, r, n):
    """Values, first and second coordinate derivatives of W_A at r.

    W_A(z)_k = (A Z)_k - z_k (A Z)_0 with Z = (1, z) is holomorphic in z.
    Returns V (2n,), DV[a, d] = d_d V^a, DDV[a, d, b] = d_d d_b V^a.
    """
    z = _z(np.asarray(r, dtype=float), n)
    Z = np.concatenate([[1.0], z])
    AZ = A @ Z
    W = AZ[1:] - z * AZ[0]
    C = A[1:, 1:] - np.eye(n) * AZ[0] - np.outer(z, A[0, 1:])
    S = -(np.einsum("km,p->kmp", np.eye(n), A[0, 1:]) + np.einsum("kp,m->kmp", np.eye(n), A[0, 1:]))
    V = np.concatenate([W.real, W.imag])
    # d/dx_m -> C[:, m], d/dy_m -> i C[:, m]
    Cr = np.concatenate([C, 1j * C], axis=1)
    DV = np.concatenate([Cr.real, Cr.imag], axis=0)
    Sr = np.empty((n, 2 * n, 2 * n), dtype=complex)
    Sr[:, :n, :n] = S
    Sr[:, :n, n:] = 1j * S
    Sr[:, n:, :n] = 1j * S
    Sr[:, n:, n:] = -S
    DDV = np.concatenate([Sr.real, Sr.imag], axis=0)
    return V, DV, DDV


def flow_chart(A, r, n, t):
    """Chart image of [e^{tA} (1, z)]."""
    z = _z(np.asarray(r, dtype=float), n)
    Z = la.expm(t * A) @ np.concatenate([[1.0], z])
    w = Z[1:] / Z[0]
    return np.concatenate([w.real, w.imag])


def killing_jet_flow_check(A, r, n):
    """max deviation of the closed-form value and first derivatives from flow differentiation."""
    V, DV, _ = killing_jet(A, r, n)
    Vn = scalar_derivative(lambda t: flow_chart(A, r, n, t))
    DVn = derivative(lambda p: scalar_derivative(lambda t: flow_chart(A, p, n, t)), r).T
    return float(max(np.max(np.abs(V - Vn)), np.max(np.abs(DV - DVn))))


@dataclass
class Geometry:
    """Metric, inverse, Christoffels, their derivatives and curvature at one chart point."""
    n: int
    r: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    gamma: np.ndarray     # gamma[a, b, c] = Gamma^a_{bc}
    dgamma: np.ndarray    # dgamma[a, b, c, d] = d_d Gamma^a_{bc}
    riem: np.ndarray      # riem[a, b, c, d] = R^a_{bcd}, R_{X,Y} Z = R^a_{bcd} Z^b X^c Y^d

    def R(self, X, Y, Z, W):
        """<R_{X,Y} Z, W>."""
        return float(np.einsum("ae,abcd,b,c,d,e->", self.g, self.riem, Z, X, Y, W))

    def ricci(self):
        return np.einsum("cbcd->bd", self.riem)

    def covariant(self, V, DV, DDV):
        """(nabla V, nabla(nabla_V V)) as (1,1) matrices M[a, d] = (nabla_d .)^a."""
        G, dG = self.gamma, self.dgamma
        N = DV + np.einsum("adc,c->ad", G, V)
        Y = N @ V
        dN = DDV + np.einsum("abcd,c->adb", dG, V) + np.einsum("abc,cd->adb", G, DV)
        dY = np.einsum("bd,ab->ad", DV, N) + np.einsum("b,adb->ad", V, dN)
        M = dY + np.einsum("adc,c->ad", G, Y)
        return N, M


def _christoffel(g, ginv, dg):
    # dg[c, a, b] = d_c g_ab
    t = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - np.einsum("dbc->dbc", dg)
    return 0.5 * np.einsum("ad,dbc->abc", ginv, t)


def geometry_at(r, n) -> Geometry:
    r = np.asarray(r, dtype=float)
    metric = lambda p: chart_metric(p, n)
    dmetric = lambda p: derivative(metric, p)

    def gamma_at(p):
        g = metric(p)
        return _christoffel(g, np.linalg.inv(g), dmetric(p))

    g = metric(r)
    ginv = np.linalg.inv(g)
    G = gamma_at(r)
    dG = np.moveaxis(derivative(gamma_at, r), 0, -1)
    riem = (np.einsum("adbc->abcd", dG) - np.einsum("acbd->abcd", dG)
            + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return Geometry(n, r, g, ginv, G, dG, riem)


@dataclass
class CpnFrame:
    n: int
    geometry: Geometry
    frame: np.ndarray          # columns: g-orthonormal tangent basis
    J: np.ndarray
    matrices: list             # su(n+1) matrices of the orthonormal Killing basis, p part first
    jets: list                 # (V, DV, DDV) per basis field
    n_p: int

    @property
    def q(self):
        return len(self.matrices)


def _null_space(M, tol):
    u, s, vt = np.linalg.svd(M)
    rank = int(np.count_nonzero(s > tol * max(1.0, s[0] if s.size else 1.0)))
    return vt[rank:].T


def cpn_frame_build(n, r=None) -> CpnFrame:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}]")
    r = np.zeros(2 * n) if r is None else np.asarray(r, dtype=float)
    geo = geometry_at(r, n)
    basis = su_basis(n)
    raw = [killing_jet(A, r, n) for A in basis]
    vals = np.column_stack([j[0] for j in raw])
    grads = np.column_stack([geo.covariant(*j)[0].ravel() for j in raw])
    f_coef = _null_space(vals, 1e-10)
    p_coef = _null_space(grads, 1e-6)
    q = len(basis)
    if f_coef.shape[1] != q - 2 * n or p_coef.shape[1] != 2 * n:
        raise FrameError(f"split dimensions {p_coef.shape[1]} + {f_coef.shape[1]} != {2 * n} + {q - 2 * n}")
    if np.max(np.abs(p_coef.T @ f_coef)) > 1e-8:
        raise FrameError("p and f parts are not orthogonal")
    coef = np.column_stack([p_coef, f_coef])
    mats = [sum(c * A for c, A in zip(col, basis)) for col in coef.T]
    jets = [tuple(sum(c * j[i] for c, j in zip(col, raw)) for i in range(3)) for col in coef.T]
    w, U = np.linalg.eigh(geo.g)
    E = U @ np.diag(w ** -0.5) @ U.T
    return CpnFrame(n, geo, E, complex_structure(n), mats, jets, 2 * n)


def mix_basis(fr: CpnFrame, seed=0) -> CpnFrame:
    """The same frame with the Killing basis rotated by a seeded random orthogonal matrix.

    The rotation mixes the p and f parts, so the result only serves checks
    that sum over the whole orthonormal basis; n_p is set to 0 to say so.
    """
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((fr.q, fr.q)))
    Q = Q * np.sign(np.diag(R))
    mats = [sum(c * A for c, A in zip(col, fr.matrices)) for col in Q.T]
    jets = [tuple(sum(c * j[i] for c, j in zip(col, fr.jets)) for i in range(3)) for col in Q.T]
    return CpnFrame(fr.n, fr.geometry, fr.frame, fr.J, mats, jets, 0)


def frame_invariants(fr: CpnFrame) -> dict:
    """Deviations of the structural properties the frame must satisfy."""
    geo, n = fr.geometry, fr.n
    p = fr.n_p
    grad_p = max(np.max(np.abs(geo.covariant(*fr.jets[k])[0])) for k in range(p))
    val_f = max((np.max(np.abs(fr.jets[k][0])) for k in range(p, fr.q)), default=0.0)
    Vp = np.column_stack([fr.jets[k][0] for k in range(p)])
    isometry = np.max(np.abs(Vp.T @ geo.g @ Vp - np.eye(p)))
    gram = np.array([[killing_form(A, B) for B in fr.matrices] for A in fr.matrices])
    ric = np.max(np.abs(geo.ricci() - 0.5 * (n + 1) * geo.g))
    E = fr.frame
    lengths = np.max(np.abs(np.sqrt(np.diag(geo.g)) - 2.0)) if np.allclose(geo.r, 0) else float("nan")
    Jg = np.max(np.abs(fr.J.T @ geo.g @ fr.J - geo.g))
    return {
        "q": fr.q, "dimP": p,
        "pGradient": float(grad_p), "fValue": float(val_f),
        "pIsometry": float(isometry), "killingOrthonormal": float(np.max(np.abs(gram - np.eye(fr.q)))),
        "ricci": float(ric), "coordinateLengths": float(lengths),
        "frameOrthonormal": float(np.max(np.abs(E.T @ geo.g @ E - np.eye(2 * n)))),
        "complexStructureIsometry": float(Jg),
    }


def unit_tangents(fr, rng, count):
    """Random tangent vectors of unit Fubini-Study length at the frame point."""
    v = rng.standard_normal((count, 2 * fr.n))
    return v / np.sqrt(np.einsum("ka,ab,kb->k", v, fr.geometry.g, v))[:, None]


def kahler_symmetry_check(fr: CpnFrame, samples=20, seed=0):
    rng = np.random.default_rng(seed)
    geo, J = fr.geometry, fr.J
    worst = 0.0
    for _ in range(samples):
        X, Y, Z, W = unit_tangents(fr, rng, 4)
        base = geo.R(X, Y, Z, W)
        worst = max(worst, abs(geo.R(J @ X, J @ Y, Z, W) - base), abs(geo.R(X, Y, J @ Z, J @ W) - base),
                    abs(geo.R(Y, X, Z, W) + base), abs(geo.R(Z, W, X, Y) - base))
    return worst


def cpn_lemma_prelim_check(fr: CpnFrame, samples=20, seed=0):
    """max |sum_k <nabla_X JV_k, Y><nabla_W JV_k, Z> - <R_{X,JY} JW, Z>| over random unit tuples."""
    rng = np.random.default_rng(seed)
    geo, J = fr.geometry, fr.J
    Ns = [J @ geo.covariant(*jet)[0] for jet in fr.jets]
    worst = 0.0
    for _ in range(samples):
        X, Y, W, Z = unit_tangents(fr, rng, 4)
        lhs = sum((Y @ geo.g @ N @ X) * (Z @ geo.g @ N @ W) for N in Ns)
        rhs = geo.R(X, J @ Y, J @ W, Z)
        worst = max(worst, abs(lhs - rhs))
    return worst


def lemma_lhs(fr: CpnFrame, X, Y, W, Z):
    geo, J = fr.geometry, fr.J
    return sum((Y @ geo.g @ (J @ geo.covariant(*jet)[0]) @ X) * (Z @ geo.g @ (J @ geo.covariant(*jet)[0]) @ W)
               for jet in fr.jets)


def _frame_tensors(fr: CpnFrame, jet):
    """A, ric, Rxx, Nabla(nabla_X X) in the orthonormal frame for X = J V."""
    geo, J, E = fr.geometry, fr.J, fr.frame
    V, DV, DDV = jet
    X, DX, DDX = J @ V, J @ DV, np.einsum("ae,edb->adb", J, DDV)
    N, M = geo.covariant(X, DX, DDX)
    g = geo.g
    A = E.T @ N.T @ g @ E
    Nf = E.T @ M.T @ g @ E
    cols = E.T
    Rxx = np.array([[geo.R(ei, X, X, ej) for ej in cols] for ei in cols])
    return A, float(np.trace(Rxx)), Rxx, Nf


def cpn_trace_check(fr: CpnFrame, samples=50, seed=0, zero_gradient=False):
    """max over samples of |sum_k Q1(JV_k)| and |sum_k (-Q2 + Q3)(JV_k)|, absolute and relative to scale."""
    rng = np.random.default_rng(seed)
    tensors = [_frame_tensors(fr, jet) for jet in fr.jets]
    q1_worst = q23_worst = 0.0
    q1_rel = q23_rel = 0.0
    for _ in range(samples):
        e = float(abs(rng.standard_normal()))
        gu = rng.standard_normal((2 * fr.n, 2))
        if zero_gradient:
            gu[:] = 0.0
        s1 = s23 = 0.0
        for A, ric, Rxx, Nf in tensors:
            q1, q2, q3 = gl_q_terms(gu, A, ric, Rxx, Nf)
            s1 += e * q1
            s23 += -q2 + q3
        scale = 1.0 + e + float(np.sum(gu ** 2))
        q1_worst, q23_worst = max(q1_worst, abs(s1)), max(q23_worst, abs(s23))
        q1_rel, q23_rel = max(q1_rel, abs(s1) / scale), max(q23_rel, abs(s23) / scale)
    return {"Q1sum": q1_worst, "Q2Q3sum": q23_worst, "Q1rel": q1_rel, "Q2Q3rel": q23_rel}


def bracket_checks(fr: CpnFrame, samples=5, seed=0):
    """[p, p] in f, [p, f] in p (matrix level) and [W_A, W_B] = -W_[A,B] at random chart points."""
    p = fr.n_p
    P = fr.matrices[:p]
    Fm = fr.matrices[p:]

    def coeffs(C, sub):
        return np.array([killing_form(C, B) for B in sub])

    pp = max(np.max(np.abs(coeffs(A @ B - B @ A, P))) for A in P for B in P)
    pf = max((np.max(np.abs(coeffs(A @ B - B @ A, Fm))) for A in P for B in Fm), default=0.0)
    rng = np.random.default_rng(seed)
    field = 0.0
    for _ in range(samples):
        r = 0.5 * rng.standard_normal(2 * fr.n)
        i, j = rng.choice(fr.q, size=2, replace=False)
        A, B = fr.matrices[i], fr.matrices[j]
        VA, DA, _ = killing_jet(A, r, fr.n)
        VB, DB, _ = killing_jet(B, r, fr.n)
        br = DB @ VA - DA @ VB
        VC = killing_jet(A @ B - B @ A, r, fr.n)[0]
        field = max(field, float(np.max(np.abs(br + VC))))
    return {"ppInF": float(pp), "pfInP": float(pf), "fieldBracket": field}


def eigenfunction(r, n):
    """f_w for w = diag(1, -1/n, ..., -1/n): (1 - |z|^2 / n) / (1 + |z|^2)."""
    z = _z(np.asarray(r, dtype=float), n)
    Z = np.concatenate([[1.0], z]) / np.sqrt(1.0 + np.vdot(z, z).real)
    w = np.diag(np.concatenate([[1.0], -np.ones(n) / n]))
    return float(np.real(np.conj(Z) @ w @ Z))


def cpn_eigenfunction_hessian(n, r=None):
    """Covariant Hessian of f_w at the chart point (numeric), with the expected-value deviations."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}]")
    r = np.zeros(2 * n) if r is None else np.asarray(r, dtype=float)
    geo = geometry_at(r, n)
    f = lambda p: eigenfunction(p, n)
    df = derivative(f, r)
    ddf = derivative(lambda p: derivative(f, p), r)
    H = ddf - np.einsum("cab,c->ab", geo.gamma, df)
    lap = float(np.einsum("ab,ab->", geo.ginv, H))
    c = (n + 1) / (2 * n)
    out = {
        "hessian": H,
        "tensorDeviation": float(np.max(np.abs(H + c * geo.g))),
        "laplacianDeviation": abs(lap + (n + 1) * f(r)),
    }
    if np.allclose(r, 0):
        Hxx, Hyy, Hxy, Hyx = H[:n, :n], H[n:, n:], H[:n, n:], H[n:, :n]
        out["diagonalDeviation"] = float(max(np.max(np.abs(np.diag(Hxx) + 2 * (n + 1) / n)),
                                             np.max(np.abs(np.diag(Hyy) + 2 * (n + 1) / n))))
        out["xxMinusYY"] = float(np.max(np.abs(Hxx - Hyy)))
        out["mixed"] = float(max(np.max(np.abs(Hxy)), np.max(np.abs(Hyx))))
    return out
