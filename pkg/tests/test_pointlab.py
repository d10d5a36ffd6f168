import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stab import pointlab as pl
from stab import ymh


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_sphere_gl_trace(n, seed):
    rep = pl.sphere_gl_report(n, samples=10, seed=seed)
    assert rep["pass"], rep
    assert rep["maxDeviation"] <= 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_sphere_ymh_trace(n, seed):
    for rep in pl.sphere_ymh_report(n, samples=10, seed=seed):
        assert rep["pass"], rep


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_ymh_degenerate_fields(n):
    # the identity still holds with the curvature or the covariant derivative switched off
    for kw in ({"zero_F": True}, {"zero_Du": True}):
        r = pl.sphere_ymh_trace(n, 5, 1, **kw)
        assert r["maxRelDeviation"] <= 1e-10


def test_sphere_gl_trace_sum_matches_target():
    r = pl.sphere_gl_trace(2, 5, 3)
    for row in r["perSample"]:
        assert abs(row["sum"] - row["target"]) <= 1e-10 * row["scale"]


def test_sphere_point_and_frame():
    rng = np.random.default_rng(0)
    for n in range(2, 9):
        x, E = pl.sphere_point(n, rng)
        assert x.shape == (n + 1,) and E.shape == (n, n + 1)
        assert abs(np.linalg.norm(x) - 1) < 1e-14
        assert np.abs(E @ x).max() < 1e-14
        assert np.abs(E @ E.T - np.eye(n)).max() < 1e-14


@pytest.mark.parametrize("n", [1, 2])
def test_cpn_report(n):
    for rep in pl.cpn_report(n, samples=10):
        assert rep["pass"], rep


def test_cpn_frame_invariants():
    inv = pl.frame_invariants(pl.cpn_frame_build(2))
    assert inv["q"] == 8
    for key in ("pIsometry", "killingOrthonormal", "frameOrthonormal", "complexStructureIsometry"):
        assert inv[key] < 1e-12
    assert inv["ricci"] < 1e-6


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 1000))
def test_cpn_trace_is_basis_independent(seed):
    fr = pl.cpn_frame_build(1)
    a = pl.cpn_trace_check(fr, samples=3, seed=7)
    b = pl.cpn_trace_check(pl.mix_basis(fr, seed), samples=3, seed=7)
    assert abs(a["Q1sum"] - b["Q1sum"]) < 1e-10
    assert abs(a["Q2Q3sum"] - b["Q2Q3sum"]) < 1e-10


def test_mix_basis_keeps_killing_form_orthonormal():
    fr = pl.mix_basis(pl.cpn_frame_build(2), seed=4)
    G = np.array([[pl.killing_form(A, B) for B in fr.matrices] for A in fr.matrices])
    assert np.abs(G - G[0, 0] * np.eye(len(fr.matrices))).max() < 1e-12


def test_su_basis_is_traceless_and_antihermitian():
    for n in (1, 2, 3):
        for A in pl.su_basis(n):
            assert abs(np.trace(A)) < 1e-14
            assert np.abs(A + A.conj().T).max() < 1e-14


def test_per_xi_integrands_on_a_vortex(ops3):
    r = ymh.minimize_vortex(ops3, 1, 0.3)
    rep = pl.per_xi_report(r.state)
    assert len(rep["perXi"]) == 3
    # the sum lands near the target; individual terms are stability-signed
    assert abs(rep["sum"] - rep["target"]) <= 0.05 * abs(rep["target"])
    scale = abs(rep["target"])
    assert min(rep["perXi"]) >= -1e-3 * scale
