"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every run goes through the harness (run_experiment / convergence_study) so the
reports checked here are the same files the CLI writes.  Reports land under a
session directory; the determinism criterion reruns the whole list in fresh
interpreters and compares the report bytes.
"""
import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from conftest import record_criterion
from stab.harness import convergence_study, defaults, run_experiment

SEED = 0

# (label, config overrides, experiment); convergence studies are marked with a levels tuple
SUITE = (
    [("c1-fem", {"mesh.level": 5}, "fem-validate")]
    + [(f"c2-sphere-gl-n{n}", {"pointlab.n": n, "pointlab.samples": 100}, "pointlab-sphere-gl") for n in range(2, 9)]
    + [(f"c3-sphere-ymh-n{n}", {"pointlab.n": n, "pointlab.samples": 100}, "pointlab-sphere-ymh")
       for n in range(2, 9)]
    + [(f"c4-cpn-n{n}", {"pointlab.n": n, "pointlab.samples": 50}, "pointlab-cpn") for n in (1, 2, 3)]
    + [("c5-inner", {"mesh.level": 5}, "inner-variation"),
       ("c5-gap", {}, ("inner-outer-gap", (3, 4, 5))),
       ("c5-fdcheck", {"mesh.level": 5}, "fdcheck")]
    + [(f"c6-certify-eps{e}", {"mesh.level": 5, "gl.epsilon": e}, "gl-certify") for e in (0.15, 0.2, 0.25, 0.3)]
    + [("c7-vortex", {"mesh.level": 5, "ymh.epsilon": 0.3, "ymh.degree": 1}, "ymh-vortex"),
       ("c7-bogomolny", {"mesh.level": 5, "ymh.epsilon": 0.3, "ymh.degree": 1}, "ymh-bogomolny"),
       ("c7-spectrum", {"mesh.level": 5, "ymh.epsilon": 0.3, "ymh.degree": 1}, "ymh-spectrum"),
       ("c8-lattice", {"mesh.level": 5, "ymh.epsilon": 0.3, "ymh.degree": 1}, "pointlab-lattice")]
)


def run_entry(root, label, over, which):
    cfg = defaults().with_values({"seed": SEED, **over})
    out = Path(root) / label
    if isinstance(which, tuple):
        return convergence_study(cfg, which[0], which[1], out)
    return run_experiment(cfg, which, out)


def run_suite(root, prefix=""):
    for label, over, which in SUITE:
        if label.startswith(prefix):
            run_entry(root, label, over, which)


@pytest.fixture(scope="session")
def acceptance_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _run(root, prefix):
    docs = {}
    for label, over, which in SUITE:
        if label.startswith(prefix):
            docs[label] = run_entry(root, label, over, which)
    return docs


def _seconds(docs):
    return sum(d.timing.get("seconds", 0.0) for d in docs.values())


def _fails(docs):
    return [f"{k}:{m}" for k, d in docs.items() for m in d.failures()]


def _finish(number, ok, detail, docs):
    record_criterion(number, ok, detail)
    assert ok, f"criterion {number}: {detail}; failing metrics {_fails(docs)}"


@pytest.mark.slow
def test_criterion_1_fem_eigenvalues(acceptance_root):
    docs = _run(acceptance_root, "c1-")
    d = docs["c1-fem"]
    secs = _seconds(docs)
    lam = [d.metrics[f"lambda{i}"]["value"] for i in range(1, 9)]
    ok = d.passed and secs < 60
    _finish(1, ok, f"lambda1..8 = {', '.join(f'{x:.5f}' for x in lam)}; {secs:.1f} s (limit 60 s)", docs)


def test_criterion_2_sphere_gl_trace(acceptance_root):
    t0 = time.perf_counter()
    docs = _run(acceptance_root, "c2-")
    secs = time.perf_counter() - t0
    worst = max(m["value"] for d in docs.values() for m in d.metrics.values())
    ok = all(d.passed for d in docs.values()) and secs < 5
    _finish(2, ok, f"n=2..8, 100 samples: max relative deviation {worst:.2e} (tol 1e-10); "
                   f"{secs:.2f} s (limit 5 s)", docs)


def test_criterion_3_sphere_ymh_trace(acceptance_root):
    docs = _run(acceptance_root, "c3-")
    worst = max(m["value"] for d in docs.values() for m in d.metrics.values())
    names = sorted({m for d in docs.values() for m in d.metrics})
    degenerate = [n for n in names if "zero" in n.lower() or "only" in n.lower()]
    ok = all(d.passed for d in docs.values()) and len(degenerate) >= 2
    _finish(3, ok, f"n=2..8 incl. degenerate {degenerate}: max relative deviation {worst:.2e} (tol 1e-10)", docs)


def test_criterion_4_cpn_identities(acceptance_root):
    docs = _run(acceptance_root, "c4-")
    secs = _seconds(docs)
    worst = {}
    for d in docs.values():
        for k, m in d.metrics.items():
            worst[k] = max(worst.get(k, 0.0), m["value"])
    ok = all(d.passed for d in docs.values()) and secs < 120
    big = max(worst, key=worst.get)
    _finish(4, ok, f"n=1..3, {len(worst)} identities; largest {big} = {worst[big]:.2e}; "
                   f"{secs:.1f} s (limit 120 s)", docs)


@pytest.mark.slow
def test_criterion_5_variation_oracles(acceptance_root):
    docs = _run(acceptance_root, "c5-")
    inner, gap, fd = docs["c5-inner"], docs["c5-gap"], docs["c5-fdcheck"]
    ok = all(d.passed for d in docs.values())
    detail = (f"inner relErr {inner.metrics['first.relError']['value']:.1e}/"
              f"{inner.metrics['second.relError']['value']:.1e}, t-order "
              f"{inner.metrics['first.tOrder']['value']:.2f}/{inner.metrics['second.tOrder']['value']:.2f}; "
              f"gap order {gap.metrics['order']['value']:.2f} (>= 1.0); "
              f"fd grad {fd.metrics['gl.gradient']['value']:.1e} hess {fd.metrics['gl.hessian']['value']:.1e}")
    _finish(5, ok, detail, docs)


@pytest.mark.slow
def test_criterion_6_gl_certificates(acceptance_root):
    docs = _run(acceptance_root, "c6-")
    critical = sum(d.observations.get("criticalPoints", 0) for d in docs.values())
    kinds = sorted({v["kind"] for d in docs.values() for v in d.observations.values() if isinstance(v, dict)
                    and "kind" in v})
    ok = all(d.passed for d in docs.values()) and critical > 0
    _finish(6, ok, f"{critical} critical points over eps in (0.15, 0.2, 0.25, 0.3); kinds {kinds}", docs)


@pytest.mark.slow
def test_criterion_7_ymh_lattice(acceptance_root):
    docs = _run(acceptance_root, "c7-")
    secs = _seconds(docs)
    v, b = docs["c7-vortex"], docs["c7-bogomolny"]
    ok = all(d.passed for d in docs.values()) and secs < 600
    detail = (f"E/2pi = {v.metrics['energyOver2PiDegree']['value']:.5f}, "
              f"lambda1/|H| = {v.metrics['stability']['value']:.1e}, "
              f"Bogomolny defect {b.metrics['defect']['value']:.2e} (>= -1e-3), "
              f"consistency {b.metrics['consistency']['value']:.2f} (<= 0.10), "
              f"trivial pair {docs['c7-spectrum'].metrics['trivialPair.quotient']['value']:.3f}; "
              f"{secs:.0f} s (limit 600 s)")
    _finish(7, ok, detail, docs)


@pytest.mark.slow
def test_criterion_8_per_xi_integrands(acceptance_root):
    docs = _run(acceptance_root, "c8-")
    vortex = _run(acceptance_root, "c7-vortex")["c7-vortex"]
    d = docs["c8-lattice"]
    per = [d.metrics[f"perXi{i}"]["value"] for i in (1, 2, 3)]
    stable = vortex.metrics["stability"]["pass"] and vortex.metrics["converged"]["pass"]
    ok = d.passed and stable
    _finish(8, ok, f"perXi/scale = {', '.join(f'{x:.3f}' for x in per)} (>= -1e-3); "
                   f"sum {d.observations['sum']:.5f} vs target {d.observations['target']:.5f}; "
                   f"vortex certified stable: {stable}", docs)


def _reports(root):
    root = Path(root)
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("report.json"))}


@pytest.mark.slow
def test_criterion_9_determinism(tmp_path):
    # two fresh interpreters so no in-process cache is shared between the runs
    tests_dir = Path(__file__).parent
    code = "import sys; sys.path.insert(0, sys.argv[1]); from test_acceptance import run_suite; run_suite(sys.argv[2])"
    env = dict(os.environ, STAB_SEED=str(SEED))
    procs = [subprocess.Popen([sys.executable, "-c", code, str(tests_dir), str(tmp_path / name)], env=env,
                              stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
             for name in ("a", "b")]
    for p in procs:
        out, _ = p.communicate()
        assert p.returncode == 0, out
    a, b = _reports(tmp_path / "a"), _reports(tmp_path / "b")
    differing = sorted(k for k in a if a[k] != b.get(k))
    ok = bool(a) and a.keys() == b.keys() and not differing
    record_criterion(9, ok, f"{len(a)} reports compared byte-for-byte across two runs; differing {differing}")
    assert ok
