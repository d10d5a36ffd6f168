"""Named experiment pipelines, each producing a ReportDoc.

An experiment reads only its config (and the seed in it), so a run is
reproducible from (config file, seed).  Solves that several experiments
share are cached per process by their full parameter tuple.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from functools import lru_cache
from pathlib import Path

import numpy as np

from .. import gl, ymh
from ..geometry import (assemble_fem, build_icosphere, conformal_field_jet, conformal_flow,
                        continuum_gl_energy, gradient_field, laplace_spectrum,
                        random_polynomial_field, sphere_quadrature)
from ..pointlab import cpn_report, per_xi_report, sphere_gl_report, sphere_ymh_report
from ..pointlab.cpn import MAX_N
from .config import ConfigError, ExperimentConfig
from .report import (ReportDoc, at_least, at_most, failed, holds, in_range, plain, within,
                     write_report)

log = logging.getLogger(__name__)

EXPERIMENTS: dict = {}


def experiment(name):
    def register(fn):
        EXPERIMENTS[name] = fn
        return fn
    return register


class Run:
    """Collects metrics, observations and artifacts for one experiment."""

    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.cfg = cfg
        self.out = Path(out)
        self.metrics = {}
        self.observations = {}
        self.artifacts = []

    def metric(self, name, entry):
        if name in self.metrics:
            raise KeyError(f"metric {name!r} recorded twice")
        self.metrics[name] = entry

    def note(self, name, value):
        self.observations[name] = plain(value)

    def path(self, filename) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts.append(filename)
        return self.out / filename

    def csv(self, filename, header, rows):
        with open(self.path(filename), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])

    def json(self, filename, doc):
        with open(self.path(filename), "w") as fh:
            json.dump(plain(doc), fh, sort_keys=True)
            fh.write("\n")

    def tol(self, key):
        return self.cfg[f"tol.{key}"]


# ---------------------------------------------------------------- shared state

@lru_cache(maxsize=8)
def fem(level):
    return assemble_fem(build_icosphere(level))


def _gl_schedule(cfg):
    return gl.Schedule(flow_steps=cfg["gl.solver.flowSteps"], flow_step=cfg["gl.solver.flowStep"],
                       newton_tol=cfg["gl.solver.tol"], newton_max_iter=cfg["gl.solver.maxIter"])


def ansatz_field(name, ops, seed):
    x = ops.mesh.vertices
    z = x[:, 0] + 1j * x[:, 1]
    if name == "constant":
        return np.full(len(x), 0.5, dtype=complex)
    if name == "zero":
        return np.zeros(len(x), dtype=complex)
    if name == "linear":
        return z
    if name == "modulated":
        return z * x[:, 2]
    if name == "harmonics":
        return random_polynomial_field(2, seed=seed)(x)
    raise ConfigError(f"unknown ansatz {name!r}", "gl.ansatz")


def ansatz_names(cfg):
    a = cfg["gl.ansatz"]
    return ["constant", "zero", "linear", "modulated", "harmonics"] if a == "all" else [a]


@lru_cache(maxsize=32)
def _gl_solution(level, eps, name, seed, sched):
    ops = fem(level)
    return gl.gl_solve(gl.make_state(ops, ansatz_field(name, ops, seed), eps), sched)


def gl_solutions(cfg):
    sched = _gl_schedule(cfg)
    return [(name, *_gl_solution(cfg["mesh.level"], cfg["gl.epsilon"], name, cfg["seed"], sched))
            for name in ansatz_names(cfg)]


def classify(state, tol=1e-6):
    u = state.u
    if np.max(np.abs(u)) <= tol:
        return "zero"
    if np.max(np.abs(u - u.mean())) <= tol:
        return "constant-unit" if np.max(np.abs(np.abs(u) - 1.0)) <= tol else "constant"
    return "nonconstant"


def dirichlet(state):
    g = gradient_field(state.ops, state.u)
    return float(state.ops.areas @ np.sum(np.abs(g) ** 2, axis=1))


@lru_cache(maxsize=8)
def _vortex(level, degree, eps, seed, tol, max_iter):
    ops = fem(level)
    sched = ymh.YMHSchedule(tol=tol, max_iter=max_iter)
    return ymh.minimize_vortex(ops, degree, eps, seed=seed, schedule=sched)


def vortex(cfg, epsilon=None):
    eps = cfg["ymh.epsilon"] if epsilon is None else float(epsilon)
    return _vortex(cfg["mesh.level"], cfg["ymh.degree"], eps, cfg["seed"], cfg["ymh.solver.tol"],
                   cfg["ymh.solver.maxIter"])


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- geometry

@experiment("fem-validate")
def fem_validate(run: Run):
    ops = fem(run.cfg["mesh.level"])
    rep = laplace_spectrum(ops, 9, seed=run.cfg["seed"])
    lam = rep.eigenvalues
    run.metric("lambda0", at_most(abs(lam[0]), run.tol("fem.zeroMode")))
    for i in range(1, 4):
        run.metric(f"lambda{i}", within(lam[i], 2.0, 2.0 * run.tol("fem.ell1")))
    for i in range(4, 9):
        run.metric(f"lambda{i}", within(lam[i], 6.0, 6.0 * run.tol("fem.ell2")))
    run.metric("residualNorm", at_most(rep.residual_norms.max(), run.tol("spectrum.residual")))
    run.note("ell1Error", float(np.max(np.abs(lam[1:4] - 2.0))))
    run.note("ell2Error", float(np.max(np.abs(lam[4:9] - 6.0))))
    run.note("areaError", float(abs(ops.lumped.sum() - 4 * np.pi)))
    run.note("vertices", ops.mesh.n_vertices)
    rep.to_csv(run.path("spectrum.csv"))


# ---------------------------------------------------------------- GL

def _flow_increase(slog):
    E = np.asarray(slog.energies)
    ph = slog.phases
    worst = -np.inf
    for k in range(1, len(E)):
        if ph[k] == "flow":
            worst = max(worst, (E[k] - E[k - 1]) / max(1.0, abs(E[k - 1])))
    return float(worst) if np.isfinite(worst) else 0.0


@experiment("gl-solve")
def gl_solve_exp(run: Run):
    for name, st, slog in gl_solutions(run.cfg):
        run.metric(f"{name}.residual", at_most(slog.residuals[-1], run.tol("gl.residual")))
        run.metric(f"{name}.flowMonotone", at_most(_flow_increase(slog), run.tol("gl.flowMonotone")))
        if slog.converged:
            run.metric(f"{name}.maxModulus", at_most(np.max(np.abs(st.u)) - 1.0, run.tol("gl.modulus")))
        run.note(name, {"energy": slog.energies[-1], "steps": len(slog.energies) - 1,
                        "converged": slog.converged, "message": slog.message, "kind": classify(st)})
        gl.save_snapshot(st, run.path(f"{name}.snapshot.json"))
        run.csv(f"{name}.log.csv", ["step", "phase", "energy", "residual"],
                [(i, p, e, r) for i, (p, e, r) in enumerate(zip(slog.phases, slog.energies, slog.residuals))])


@experiment("gl-spectrum")
def gl_spectrum_exp(run: Run):
    k = run.cfg["gl.spectrum.k"]
    for name, st, slog in gl_solutions(run.cfg):
        rep = gl.gl_spectrum(st, k, seed=run.cfg["seed"])
        lam = rep.eigenvalues
        run.metric(f"{name}.residualNorm", at_most(rep.residual_norms.max(), run.tol("spectrum.residual")))
        run.metric(f"{name}.ascending", holds(bool(np.all(np.diff(lam) >= 0))))
        run.note(name, {"eigenvalues": lam, "criticalResidual": slog.residuals[-1], "kind": classify(st)})
        rep.to_csv(run.path(f"{name}.spectrum.csv"))


def _conformal_second(st):
    """Second inner variation along X_{e_i} at a critical point, i = 1..3."""
    return [gl.gl_inner_second_critical(st, e) for e in np.eye(3)]


@experiment("gl-trace")
def gl_trace_exp(run: Run):
    for name, st, slog in gl_solutions(run.cfg):
        per = _conformal_second(st)
        scale = 1.0 + dirichlet(st)
        # on S^2 the sum over the basis is -(n - 2) int |grad u|^2 = 0
        run.metric(f"{name}.traceSum", at_most(abs(sum(per)) / scale, run.tol("gl.trace")))
        first = [gl.gl_inner_first(st, conformal_field_jet(e)) for e in np.eye(3)]
        run.note(name, {"perXi": per, "innerFirst": first, "scale": scale,
                        "criticalResidual": slog.residuals[-1], "kind": classify(st)})


@experiment("gl-certify")
def gl_certify_exp(run: Run):
    seed = run.cfg["seed"]
    certified = 0
    for name, st, slog in gl_solutions(run.cfg):
        kind = classify(st)
        info = {"kind": kind, "criticalResidual": slog.residuals[-1], "energy": slog.energies[-1]}
        if slog.residuals[-1] > run.tol("gl.residual"):
            info["status"] = "not critical; no certificate required"
            run.note(name, info)
            continue
        certified += 1
        eps2 = st.epsilon ** 2
        cert = gl.gl_instability_certificate(st, seed=seed)
        info.update(source=cert.source, rayleighQuotient=cert.rayleigh_quotient,
                    outerConformalSecond=cert.span_second_variations)
        if kind == "constant-unit":
            lam1 = float(gl.gl_spectrum(st, 1, seed=seed).eigenvalues[0])
            run.metric(f"{name}.lambda1", at_least(lam1, -run.tol("gl.constantLambda")))
            info["lambda1"] = lam1
        elif kind == "zero":
            lam1 = float(gl.gl_spectrum(st, 1, seed=seed).eigenvalues[0])
            run.metric(f"{name}.lambda1", within(lam1, -1.0 / eps2, run.tol("gl.zeroLambda") / eps2))
            run.metric(f"{name}.certified", holds(cert.found))
            info["lambda1"] = lam1
        else:
            run.metric(f"{name}.rayleighQuotient", at_most(cert.rayleigh_quotient, 0.0))
            run.metric(f"{name}.certified", holds(cert.found, cert.source))
            per = _conformal_second(st)
            scale = 1.0 + dirichlet(st)
            run.metric(f"{name}.conformalSum", at_most(abs(sum(per)) / scale, run.tol("gl.spanSum")))
            info.update(innerConformalSecond=per, scale=scale)
        if cert.direction is not None:
            run.csv(f"{name}.direction.csv", ["vertex", "re", "im"],
                    [(i, c.real, c.imag) for i, c in enumerate(cert.direction)])
        run.note(name, info)
    run.note("criticalPoints", certified)


# ---------------------------------------------------------------- oracles

def _order(a, b, c):
    """Observed order from three values at steps h, h/2, h/4."""
    d1, d2 = abs(a - b), abs(b - c)
    if d2 == 0.0:
        return math.inf
    return math.log2(d1 / d2)


@experiment("fdcheck")
def fdcheck_exp(run: Run):
    cfg = run.cfg
    ops = fem(cfg["mesh.level"])
    x = ops.mesh.vertices
    seed = cfg["seed"]
    u = random_polynomial_field(3, seed=seed)(x)
    v = random_polynomial_field(3, seed=seed + 1)(x)

    st = gl.make_state(ops, u, cfg["gl.epsilon"])
    E = lambda t: gl.gl_energy(st.with_u(u + t * v))
    dE = gl.mass_inner(st, gl.gl_residual(st), v)
    cd = lambda h: (E(h) - E(-h)) / (2 * h)
    h = cfg["fd.gradientStep"]
    run.metric("gl.gradient", at_most(_rel(cd(h), dE), run.tol("fd.gradient")))
    h0 = cfg["fd.orderStep"]
    run.metric("gl.gradientOrder", at_least(math.log2(abs(cd(h0) - dE) / abs(cd(h0 / 2) - dE)),
                                            run.tol("fd.order")))
    q = gl.gl_outer_second_variation(st, v)
    h = cfg["fd.hessianStep"]
    run.metric("gl.hessian", at_most(_rel((E(h) - 2 * E(0) + E(-h)) / h ** 2, q), run.tol("fd.hessian")))
    run.metric("gl.hessianSymmetry", at_most(_rel(gl.mass_inner(st, gl.gl_hessian_apply(st, v), u),
                                                  gl.mass_inner(st, v, gl.gl_hessian_apply(st, u))), 1e-12))

    rng = np.random.default_rng(seed)
    ys = ymh.make_state(ops, ymh.bundle_init(ops.mesh, cfg["ymh.degree"]), u, cfg["ymh.epsilon"])
    dth = 0.1 * rng.standard_normal(ops.mesh.n_edges)
    dx = ymh.pack(v, dth)
    F = lambda t: ymh.ymh_energy(ys.replace(u=ys.u + t * v, phases=ys.bundle.phases + t * dth))
    g = float(ymh.gradient_vector(ys) @ dx)
    h = cfg["fd.ymhGradientStep"]
    run.metric("ymh.gradient", at_most(_rel((F(h) - F(-h)) / (2 * h), g), run.tol("fd.gradient")))
    H = ymh.ymh_hessian(ys)
    q = float(dx @ (H @ dx))
    h = cfg["fd.hessianStep"]
    run.metric("ymh.hessian", at_most(_rel((F(h) - 2 * F(0) + F(-h)) / h ** 2, q), run.tol("fd.hessian")))
    asym = abs(H - H.T).max()
    run.metric("ymh.hessianSymmetry", at_most(asym / abs(H).max(), 1e-12))
    T = ymh.gauge_tangent(ys)
    phi = rng.standard_normal(ops.mesh.n_vertices)
    run.metric("ymh.gaugeDirection", at_most(abs(ymh.gradient_vector(ys) @ (T @ phi))
                                             / (np.linalg.norm(ymh.gradient_vector(ys)) * np.linalg.norm(T @ phi)),
                                             1e-12))


@experiment("inner-variation")
def inner_variation_exp(run: Run):
    cfg = run.cfg
    seed = cfg["seed"]
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(3)
    xi /= np.linalg.norm(xi)
    eps = cfg["inner.epsilon"]
    P = random_polynomial_field(cfg["inner.fieldDegree"], seed=seed)
    pts, w = sphere_quadrature(cfg["inner.quadratureLevel"])
    E = lambda t: continuum_gl_energy(lambda y: P(conformal_flow(y, xi, t)), eps, pts, w)
    E0 = E(0.0)
    ts = [cfg["inner.t"] / 2 ** k for k in range(3)]
    d1, d2 = [], []
    for t in ts:
        ep, em = E(t), E(-t)
        d1.append((ep - em) / (2 * t))
        d2.append((ep - 2 * E0 + em) / t ** 2)
    ops = fem(cfg["mesh.level"])
    st = gl.make_state(ops, P(ops.mesh.vertices), eps)
    J = conformal_field_jet(xi)
    i1 = gl.gl_inner_first(st, J)
    i2 = gl.gl_inner_second_general(st, J)
    run.metric("first.relError", at_most(_rel(i1, d1[-1]), run.tol("inner.rel")))
    run.metric("second.relError", at_most(_rel(i2, d2[-1]), run.tol("inner.rel")))
    run.metric("first.tOrder", at_least(_order(*d1), run.tol("inner.order")))
    run.metric("second.tOrder", at_least(_order(*d2), run.tol("inner.order")))
    run.note("xi", xi)
    run.note("t", ts)
    run.note("firstDifferences", d1)
    run.note("secondDifferences", d2)
    run.note("innerFirst", i1)
    run.note("innerSecond", i2)


@experiment("inner-outer-gap")
def inner_outer_gap_exp(run: Run):
    """Second inner variation minus its outer decomposition, for a smooth non-critical field."""
    cfg = run.cfg
    ops = fem(cfg["mesh.level"])
    x = ops.mesh.vertices
    rng = np.random.default_rng(cfg["seed"])
    xi = rng.standard_normal(3)
    xi /= np.linalg.norm(xi)
    P = random_polynomial_field(cfg["inner.fieldDegree"], seed=cfg["seed"])
    st = gl.make_state(ops, P(x), cfg["inner.epsilon"])
    J = conformal_field_jet(xi)
    X = J.x(x)
    dxu = np.einsum("vd,vd->v", gradient_field(ops, st.u, vertex=True), X)
    dxxu = np.einsum("vd,vd->v", gradient_field(ops, dxu, vertex=True), X)
    rhs = gl.gl_outer_second_variation(st, dxu) + float(np.real(np.vdot(gl.gl_gradient(st), dxxu)))
    lhs = gl.gl_inner_second_general(st, J)
    run.note("inner", lhs)
    run.note("outer", rhs)
    run.note("gap", abs(lhs - rhs))
    run.note("relativeGap", _rel(lhs, rhs) if rhs else abs(lhs - rhs))


# ---------------------------------------------------------------- YMH

def _ymh_log_rows(lg):
    return [(i, p, e, g, d) for i, (p, e, g, d) in
            enumerate(zip(lg.phases, lg.energies, lg.gradient_norms, lg.degrees))]


@experiment("ymh-vortex")
def ymh_vortex_exp(run: Run):
    cfg = run.cfg
    d = cfg["ymh.degree"]
    res = vortex(cfg)
    st = res.state
    run.metric("converged", holds(res.log.converged, res.log.message))
    run.metric("degree", holds(ymh.ymh_degree(st.bundle) == d, f"degree {ymh.ymh_degree(st.bundle)}"))
    if d != 0:
        run.metric("energyOver2PiDegree", in_range(res.energy / (2 * np.pi * abs(d)),
                                                   run.tol("ymh.energyLow"), run.tol("ymh.energyHigh")))
    run.metric("stability", at_least(res.lambda1 / res.hessian_norm, -run.tol("ymh.stability")))
    run.metric("maxModulus", at_most(np.max(np.abs(st.u)) - 1.0, run.tol("gl.modulus")))

    rng = np.random.default_rng(cfg["seed"])
    E = ymh.ymh_energy(st)
    worst = 0.0
    same_degree = True
    for _ in range(3):
        g = ymh.gauge_transform(st, rng.uniform(-np.pi, np.pi, st.mesh.n_vertices))
        worst = max(worst, abs(ymh.ymh_energy(g) - E) / max(1.0, abs(E)))
        same_degree &= ymh.ymh_degree(g.bundle) == ymh.ymh_degree(st.bundle)
    c = ymh.coulomb_project(st)
    worst = max(worst, abs(ymh.ymh_energy(c) - E) / max(1.0, abs(E)))
    run.metric("gaugeInvarianceEnergy", at_most(worst, run.tol("ymh.gauge")))
    run.metric("gaugeInvarianceDegree", holds(same_degree and ymh.ymh_degree(c.bundle) == d))
    quant = [ymh.ymh_degree(ymh.bundle_init(st.mesh, k)) == k for k in range(-3, 4)]
    run.metric("degreeQuantization", holds(all(quant)))

    run.note("energy", res.energy)
    run.note("energyOver2Pi", res.energy / (2 * np.pi))
    run.note("lambda1", res.lambda1)
    run.note("hessianNorm", res.hessian_norm)
    run.note("iterations", len(res.log.energies) - 1)
    ymh.save_state(st, run.path("state.json"))
    run.csv("log.csv", ["step", "phase", "energy", "gradientNorm", "degree"], _ymh_log_rows(res.log))


@experiment("ymh-bogomolny")
def ymh_bogomolny_exp(run: Run):
    cfg = run.cfg
    res = vortex(cfg)
    tol_d, tol_c = run.tol("ymh.defect"), run.tol("ymh.consistency")
    bog = ymh.bogomolny_defect(res.state)
    run.metric("defect", at_least(bog.defect, -tol_d))
    run.metric("consistency", at_most(_rel(bog.defect, bog.residual_sum), tol_c))
    # the same decomposition away from a minimizer, where the residuals dominate
    ops = fem(cfg["mesh.level"])
    start = ymh.make_state(ops, ymh.bundle_init(ops.mesh, cfg["ymh.degree"]),
                           ymh.initial_section(ops, cfg["seed"]), cfg["ymh.epsilon"])
    b0 = ymh.bogomolny_defect(start)
    run.metric("start.defect", at_least(b0.defect, -tol_d))
    run.metric("start.consistency", at_most(_rel(b0.defect, b0.residual_sum), tol_c))
    run.note("defect", bog.defect)
    run.note("defectOver2Pi", bog.defect / (2 * np.pi))
    run.note("residualSum", bog.residual_sum)
    run.note("start", {"defect": b0.defect, "residualSum": b0.residual_sum})
    bog.to_csv(run.path("faces.csv"))


@experiment("ymh-spectrum")
def ymh_spectrum_exp(run: Run):
    cfg = run.cfg
    res = vortex(cfg)
    st = res.state
    k = cfg["gl.spectrum.k"]
    rep = ymh.ymh_spectrum_gauge_fixed(st, k, seed=cfg["seed"])
    leak = ymh.gauge_leak(st, rep.eigenvectors)
    run.metric("residualNorm", at_most(rep.residual_norms.max(), run.tol("spectrum.residual")))
    run.metric("gaugeLeak", at_most(leak.max(), run.tol("ymh.gaugeLeak")))
    run.metric("stability", at_least(rep.eigenvalues[0] / res.hessian_norm, -run.tol("ymh.stability")))
    eps = cfg["ymh.epsilon"]
    tp = ymh.trivial_pair_certificate(fem(cfg["mesh.level"]), eps, seed=cfg["seed"])
    band = run.tol("ymh.trivialPair") / eps ** 2
    run.metric("trivialPair.quotient", within(tp.rayleigh_quotient, -1.0 / eps ** 2, band))
    run.metric("trivialPair.negative", at_most(tp.rayleigh_quotient, 0.0))
    run.note("eigenvalues", rep.eigenvalues)
    run.note("hessianNorm", res.hessian_norm)
    run.note("trivialPair", {"quotient": tp.rayleigh_quotient, "lambda1": tp.lambda1,
                             "expected": tp.expected})
    rep.to_csv(run.path("spectrum.csv"))


@experiment("ymh-scan-epsilon")
def ymh_scan_exp(run: Run):
    cfg = run.cfg
    rows = []
    for eps in cfg["ymh.scan"]:
        r = vortex(cfg, eps)
        stable = r.lambda1 >= -run.tol("ymh.stability") * r.hessian_norm
        rows.append({"epsilon": eps, "energyOver2Pi": r.energy / (2 * np.pi), "lambda1": r.lambda1,
                     "hessianNorm": r.hessian_norm, "stable": bool(stable), "converged": r.log.converged,
                     "defect": r.defect})
        run.metric(f"eps={eps:g}.converged", holds(r.log.converged, r.log.message))
    unstable = [r["epsilon"] for r in rows if not r["stable"]]
    run.note("rows", rows)
    run.note("firstUnstableEpsilon", min(unstable) if unstable else None)
    keys = ["epsilon", "energyOver2Pi", "lambda1", "hessianNorm", "stable", "converged", "defect"]
    run.csv("scan.csv", keys, [[r[k] for k in keys] for r in rows])


# ---------------------------------------------------------------- pointwise algebra

def _entries(run, entries):
    for e in entries:
        run.metric(f"{e['identity']}.n{e['n']}", at_most(e["maxDeviation"], e["tolerance"]))
    run.note("entries", entries)


def _point_args(cfg):
    return cfg["pointlab.n"], cfg["pointlab.samples"], cfg["pointlab.seed"]


@experiment("pointlab-sphere-gl")
def sphere_gl_exp(run: Run):
    n, s, seed = _point_args(run.cfg)
    if n < 2:
        raise ConfigError("pointlab.n must be >= 2 for sphere identities", "pointlab.n")
    _entries(run, [sphere_gl_report(n, s, seed, tol=run.tol("pointlab.sphere"))])


@experiment("pointlab-sphere-ymh")
def sphere_ymh_exp(run: Run):
    n, s, seed = _point_args(run.cfg)
    if n < 2:
        raise ConfigError("pointlab.n must be >= 2 for sphere identities", "pointlab.n")
    _entries(run, sphere_ymh_report(n, s, seed, tol=run.tol("pointlab.sphere")))


@experiment("pointlab-cpn")
def cpn_exp(run: Run):
    n, s, seed = _point_args(run.cfg)
    if n > MAX_N:
        raise ConfigError(f"pointlab.n must be <= {MAX_N} for CP^n", "pointlab.n")
    t = {"lemma": run.tol("pointlab.cpnLemma"), "trace": run.tol("pointlab.cpnTrace"),
         "hessian": run.tol("pointlab.cpnHessian"), "ricci": run.tol("pointlab.cpnRicci")}
    _entries(run, cpn_report(n, s, seed, tol=t))


@experiment("pointlab-lattice")
def lattice_exp(run: Run):
    res = vortex(run.cfg)
    rep = per_xi_report(res.state)
    target = rep["target"]
    scale = max(1.0, abs(target))
    for i, val in enumerate(rep["perXi"]):
        run.metric(f"perXi{i + 1}", at_least(val / scale, -run.tol("pointlab.perXi")))
    run.metric("xiSum", within(rep["sum"], target, run.tol("pointlab.xiSum") * abs(target)))
    run.note("perXi", rep["perXi"])
    run.note("sum", rep["sum"])
    run.note("target", target)
    run.note("lambda1", res.lambda1)


# ---------------------------------------------------------------- drivers

def run_experiment(cfg: ExperimentConfig, which: str, out=None, write=True) -> ReportDoc:
    """Run one named experiment; module errors become a failing `error` metric."""
    if which not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {which!r}; known: {', '.join(sorted(EXPERIMENTS))}")
    out = Path(cfg["output.dir"]) / which if out is None else Path(out)
    run = Run(cfg, out)
    t0 = time.perf_counter()
    try:
        EXPERIMENTS[which](run)
    except ConfigError:
        raise
    except Exception as exc:  # reported, not raised: the report records the failure
        log.exception("experiment %s failed", which)
        run.metrics["error"] = failed(f"{type(exc).__name__}: {exc}")
    doc = ReportDoc(which, cfg.echo(), run.metrics, run.observations, run.artifacts,
                    {"seconds": time.perf_counter() - t0})
    if write:
        write_report(doc, out)
    return doc


# observation used as the per-level error, and how the levels are judged
CONVERGENCE = {
    "fem-validate": ("ell1Error", "order", "converge.femOrder"),
    "inner-outer-gap": ("gap", "order", "converge.gapOrder"),
    "ymh-bogomolny": ("defect", "non-increasing", "converge.noise"),
}


def convergence_study(cfg: ExperimentConfig, experiment: str, levels, out=None) -> ReportDoc:
    """Run `experiment` at each level and judge the refinement behaviour of its error."""
    if experiment not in CONVERGENCE:
        raise ConfigError(f"no convergence quantity for {experiment!r}; choose from "
                          f"{', '.join(sorted(CONVERGENCE))}")
    levels = [int(x) for x in levels]
    if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels must be at least two strictly ascending integers")
    key, mode, tol_key = CONVERGENCE[experiment]
    name = f"converge-{experiment}"
    out = Path(cfg["output.dir"]) / name if out is None else Path(out)
    run = Run(cfg, out)
    tol = run.tol(tol_key)
    t0 = time.perf_counter()
    rows = []
    for L in levels:
        sub = run_experiment(cfg.with_values({"mesh.level": L}), experiment, out / f"level-{L}")
        run.artifacts.append(f"level-{L}/report.json")
        if "error" in sub.metrics:
            run.metrics[f"level{L}"] = sub.metrics["error"]
            break
        rows.append((L, float(sub.observations[key])))
    orders = [math.log2(abs(a[1]) / abs(b[1])) if b[1] else math.inf for a, b in zip(rows, rows[1:])]
    if len(rows) == len(levels):
        if mode == "order":
            run.metric("order", at_least(min(orders), tol))
        else:
            growth = max(abs(b[1]) / abs(a[1]) - 1.0 if a[1] else 0.0 for a, b in zip(rows, rows[1:]))
            run.metric("nonIncreasing", at_most(growth, tol))
    run.note("quantity", key)
    run.note("levels", [r[0] for r in rows])
    run.note("values", [r[1] for r in rows])
    run.note("orders", orders)
    run.csv("convergence.csv", ["level", "value", "order"],
            [(L, v, orders[i - 1] if i else "") for i, (L, v) in enumerate(rows)])
    doc = ReportDoc(name, cfg.echo(), run.metrics, run.observations, run.artifacts,
                    {"seconds": time.perf_counter() - t0})
    write_report(doc, out)
    return doc
