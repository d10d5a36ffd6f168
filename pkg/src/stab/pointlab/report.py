"""Pass/fail summaries of the pointwise identities."""
from __future__ import annotations

from .cpn import (bracket_checks, cpn_eigenfunction_hessian, cpn_frame_build, cpn_lemma_prelim_check,
                  cpn_trace_check, frame_invariants, kahler_symmetry_check, mix_basis)
from .sphere import sphere_gl_trace, sphere_ymh_trace

SPHERE_TOL = 1e-10
CPN_TOL = {"lemma": 1e-6, "trace": 1e-5, "hessian": 1e-6, "ricci": 1e-6, "kahler": 1e-6,
           "brackets": 1e-8, "frame": 1e-8}


def _entry(identity, n, samples, seed, dev, scale_note, tol):
    return {"identity": identity, "n": int(n), "samples": int(samples), "seed": int(seed),
            "maxDeviation": float(dev), "scale": scale_note, "tolerance": tol, "pass": bool(dev <= tol)}


def sphere_gl_report(n, samples=100, seed=0, tol=SPHERE_TOL):
    r = sphere_gl_trace(n, samples, seed)
    return _entry("sphere-gl-trace", n, samples, seed, r["maxRelDeviation"], "1+|grad u|^2+e", tol)


def sphere_ymh_report(n, samples=100, seed=0, tol=SPHERE_TOL):
    out = []
    r = sphere_ymh_trace(n, samples, seed)
    out.append(_entry("sphere-ymh-trace", n, samples, seed, r["maxRelDeviation"],
                      "1+e+eps^2|F|^2+|Du|^2", tol))
    if n == 4:
        r = sphere_ymh_trace(n, samples, seed, zero_Du=True)
        out.append(_entry("sphere-ymh-trace-F-only", n, samples, seed,
                          max(abs(s["sum"]) / s["scale"] for s in r["perSample"]), "1+e+eps^2|F|^2", tol))
    if n == 2:
        r = sphere_ymh_trace(n, samples, seed, zero_F=True)
        out.append(_entry("sphere-ymh-trace-Du-only", n, samples, seed,
                          max(abs(s["sum"]) / s["scale"] for s in r["perSample"]), "1+e+|Du|^2", tol))
    return out


def cpn_report(n, samples=50, seed=0, tol=None):
    """Every CP^n check as a pass/fail entry; `tol` overrides entries of CPN_TOL."""
    fr = cpn_frame_build(n)
    inv = frame_invariants(fr)
    tr = cpn_trace_check(fr, samples, seed)
    hess = cpn_eigenfunction_hessian(n)
    br = bracket_checks(fr, seed=seed)
    mixed = [cpn_trace_check(mix_basis(fr, seed + k + 1), samples, seed) for k in range(2)]
    mixed_dev = max(max(m["Q1rel"], m["Q2Q3rel"]) for m in mixed)
    t = {**CPN_TOL, **(tol or {})}
    frame_dev = max(inv["pGradient"], inv["fValue"], inv["pIsometry"], inv["killingOrthonormal"],
                    inv["coordinateLengths"])
    return [
        _entry("cpn-frame", n, 0, seed, frame_dev, "absolute", t["frame"]),
        _entry("cpn-ricci", n, 0, seed, inv["ricci"], "absolute", t["ricci"]),
        _entry("cpn-kahler-symmetry", n, samples, seed, kahler_symmetry_check(fr, samples, seed),
               "unit vectors", t["kahler"]),
        _entry("cpn-lemma-prelim", n, samples, seed, cpn_lemma_prelim_check(fr, samples, seed),
               "unit vectors", t["lemma"]),
        _entry("cpn-trace-Q1", n, samples, seed, tr["Q1rel"], "1+e+|grad u|^2", t["trace"]),
        _entry("cpn-trace-Q2Q3", n, samples, seed, tr["Q2Q3rel"], "1+e+|grad u|^2", t["trace"]),
        _entry("cpn-trace-mixed-basis", n, samples, seed, mixed_dev, "1+e+|grad u|^2", t["trace"]),
        _entry("cpn-hessian-tensor", n, 0, seed, hess["tensorDeviation"], "absolute", t["hessian"]),
        _entry("cpn-hessian-diagonal", n, 0, seed, hess["diagonalDeviation"], "absolute", t["hessian"]),
        _entry("cpn-eigenfunction", n, 0, seed, hess["laplacianDeviation"], "absolute", t["hessian"]),
        _entry("cpn-brackets", n, 5, seed, max(br.values()), "absolute", t["brackets"]),
    ]
