import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stab.geometry import conformal_field_jet, gradient_field, random_polynomial_field
from stab.gl import (GLParams, Schedule, gl_energy, gl_gradient, gl_hessian_apply, gl_inner_first,
                     gl_inner_second_critical, gl_inner_second_general, gl_instability_certificate,
                     gl_morse_index, gl_outer_second_variation, gl_residual, gl_solve, gl_spectrum,
                     load_snapshot, make_state, mass_inner, residual_norm, save_snapshot)

seeds = st.integers(0, 10_000)


def smooth(ops, seed, degree=3):
    return random_polynomial_field(degree, seed=seed)(ops.mesh.vertices)


def test_params_validate():
    with pytest.raises(ValueError):
        GLParams(-1.0)
    with pytest.raises(ValueError):
        GLParams(float("nan"))


def test_state_rejects_bad_input(ops2):
    with pytest.raises(ValueError):
        make_state(ops2, np.ones(3), 0.5)
    u = np.ones(ops2.mesh.n_vertices, dtype=complex)
    u[0] = np.nan
    with pytest.raises(ValueError):
        make_state(ops2, u, 0.5)


def test_energy_of_unit_constant_and_zero(ops3):
    n = ops3.mesh.n_vertices
    # K @ 1 vanishes only to roundoff
    assert abs(gl_energy(make_state(ops3, np.ones(n), 0.5))) < 1e-12
    E0 = gl_energy(make_state(ops3, np.zeros(n), 0.5))
    assert abs(E0 - ops3.lumped.sum() / (4 * 0.25)) < 1e-12
    assert abs(E0 - 4 * np.pi) < 0.02 * 4 * np.pi


def test_energy_matches_direct_quadrature(ops3):
    # u = f_xi: face-gradient Dirichlet term plus lumped potential, evaluated by hand
    xi = np.array([0.0, 0.6, 0.8])
    f = ops3.mesh.vertices @ xi
    eps = 0.4
    p = ops3.mesh.vertices[ops3.mesh.faces]
    total = 0.0
    for k, (a, b, c) in enumerate(p):
        n = np.cross(b - a, c - a)
        area = 0.5 * np.linalg.norm(n)
        g = xi - (xi @ n) * n / (n @ n)
        total += 0.5 * (g @ g) * area
    total += ops3.lumped @ ((1 - f ** 2) ** 2) / (4 * eps ** 2)
    assert abs(gl_energy(make_state(ops3, f, eps)) - total) < 1e-10


@settings(max_examples=10, deadline=None)
@given(seeds, st.floats(0, 2 * np.pi))
def test_energy_symmetries(ops2, seed, phase):
    u = smooth(ops2, seed)
    E = gl_energy(make_state(ops2, u, 0.3))
    assert abs(gl_energy(make_state(ops2, np.exp(1j * phase) * u, 0.3)) - E) <= 1e-12 * max(1, E)
    assert abs(gl_energy(make_state(ops2, np.conj(u), 0.3)) - E) <= 1e-12 * max(1, E)
    assert E >= 0


def test_residual_vanishes_at_constants(ops2):
    n = ops2.mesh.n_vertices
    assert residual_norm(make_state(ops2, np.ones(n), 0.5)) < 1e-13
    assert residual_norm(make_state(ops2, np.zeros(n), 0.5)) == 0.0


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_gradient_directional_derivative(ops3, seed):
    u, v = smooth(ops3, seed), smooth(ops3, seed + 1)
    s = make_state(ops3, u, 0.4)
    dE = mass_inner(s, gl_residual(s), v)
    assert abs(dE - np.real(np.vdot(gl_gradient(s), v))) <= 1e-12 * max(1, abs(dE))
    E = lambda t: gl_energy(s.with_u(u + t * v))
    h = 1e-5
    assert abs((E(h) - E(-h)) / (2 * h) - dE) <= 1e-6 * abs(dE)
    # observed order of the centered difference
    e1 = abs((E(1e-2) - E(-1e-2)) / 2e-2 - dE)
    e2 = abs((E(5e-3) - E(-5e-3)) / 1e-2 - dE)
    assert np.log2(e1 / e2) >= 1.9


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_hessian_symmetry_and_second_difference(ops3, seed):
    u, v, w = (smooth(ops3, seed + k) for k in range(3))
    s = make_state(ops3, u, 0.4)
    a = mass_inner(s, gl_hessian_apply(s, v), w)
    b = mass_inner(s, v, gl_hessian_apply(s, w))
    assert abs(a - b) <= 1e-12 * max(1, abs(a))
    q = gl_outer_second_variation(s, v)
    assert abs(q - mass_inner(s, gl_hessian_apply(s, v), v)) <= 1e-12 * max(1, abs(q))
    E = lambda t: gl_energy(s.with_u(u + t * v))
    h = 1e-4
    assert abs((E(h) - 2 * E(0) + E(-h)) / h ** 2 - q) <= 1e-5 * abs(q)


def test_hessian_is_derivative_of_residual(ops3):
    u, v = smooth(ops3, 7), smooth(ops3, 8)
    s = make_state(ops3, u, 0.4)
    h = 1e-6
    num = (gl_residual(s.with_u(u + h * v)) - gl_residual(s.with_u(u - h * v))) / (2 * h)
    Hv = gl_hessian_apply(s, v)
    assert np.abs(num - Hv).max() <= 1e-6 * np.abs(Hv).max()


def test_second_variation_examples(ops3):
    n = ops3.mesh.n_vertices
    one = np.ones(n)
    eps = 0.5
    area = ops3.lumped.sum()
    s1 = make_state(ops3, one, eps)
    assert abs(gl_outer_second_variation(s1, 0.7 * one) - 2 * 0.49 * area / eps ** 2) < 1e-10
    assert abs(gl_outer_second_variation(s1, 1j * one)) < 1e-12
    assert np.abs(gl_hessian_apply(s1, 1j * one)).max() < 1e-12
    s0 = make_state(ops3, np.zeros(n), eps)
    assert abs(gl_outer_second_variation(s0, one) + area / eps ** 2) < 1e-10


def test_spectrum_examples(ops3):
    n = ops3.mesh.n_vertices
    rep = gl_spectrum(make_state(ops3, np.ones(n), 0.5), 4)
    assert abs(rep.eigenvalues[0]) < 1e-8
    assert rep.eigenvalues[1] > 1e-3
    assert np.all(np.diff(rep.eigenvalues) >= 0)
    assert np.all(rep.residual_norms <= 1e-8)
    rep = gl_spectrum(make_state(ops3, np.zeros(n), 0.5), 2)
    assert abs(rep.eigenvalues[0] + 4.0) < 0.04


def test_spectrum_rejects_bad_k(ops2):
    with pytest.raises(ValueError):
        gl_spectrum(make_state(ops2, np.ones(ops2.mesh.n_vertices), 0.5), 0)


def test_morse_index(ops3):
    n = ops3.mesh.n_vertices
    assert gl_morse_index(make_state(ops3, np.ones(n), 0.5)).index == 0
    # l = 0 and l = 1 modes lie below 1/eps^2 = 4; each complex mode counts twice on the real space
    assert gl_morse_index(make_state(ops3, np.zeros(n), 0.5)).index == 8
    with pytest.raises(ValueError):
        gl_morse_index(make_state(ops3, np.zeros(n), 0.5), tol=0.0)


def test_morse_index_phase_invariant(ops3):
    s, _ = gl_solve(make_state(ops3, ops3.mesh.vertices[:, 0] + 1j * ops3.mesh.vertices[:, 1], 0.3))
    a = gl_morse_index(s).index
    b = gl_morse_index(s.with_u(np.exp(0.9j) * s.u)).index
    assert a == b >= 1


def test_solve_from_half_reaches_unit_constant(ops3):
    s, log = gl_solve(make_state(ops3, 0.5 * np.ones(ops3.mesh.n_vertices), 0.3))
    assert log.converged and log.residuals[-1] <= 1e-8
    assert np.abs(np.abs(s.u) - 1).max() < 1e-8
    E = np.array([e for e, p in zip(log.energies, log.phases) if p in ("start", "flow")])
    assert np.all(np.diff(E) <= 1e-12 * np.maximum(1, np.abs(E[:-1])))


def test_solve_vortex_pair_is_unstable(ops3):
    x = ops3.mesh.vertices
    s, log = gl_solve(make_state(ops3, x[:, 0] + 1j * x[:, 1], 0.25))
    assert log.converged and log.residuals[-1] <= 1e-8
    assert np.abs(s.u).max() <= 1 + 1e-6
    cert = gl_instability_certificate(s)
    assert cert.found and cert.rayleigh_quotient < 0
    assert cert.source == "conformal-span"


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(flow_step=0.0)
    with pytest.raises(ValueError):
        Schedule(newton_max_iter=-1)


def test_certificate_at_zero_and_constant(ops3):
    n = ops3.mesh.n_vertices
    c = gl_instability_certificate(make_state(ops3, np.zeros(n), 0.5))
    assert c.found and abs(c.rayleigh_quotient + 4.0) < 0.04
    c = gl_instability_certificate(make_state(ops3, np.ones(n), 0.5))
    assert not c.found and c.lambda1 >= -1e-8


def test_inner_variations_vanish_at_unit_constant(ops3):
    s = make_state(ops3, np.ones(ops3.mesh.n_vertices), 0.5)
    J = conformal_field_jet(np.array([0.0, 0.6, 0.8]))
    assert abs(gl_inner_first(s, J)) < 1e-12
    assert abs(gl_inner_second_general(s, J)) < 1e-12
    assert abs(gl_inner_second_critical(s, [0, 0, 1])) < 1e-12


def test_inner_first_of_nonunit_constant_is_small(ops3):
    s = make_state(ops3, 0.5 * np.ones(ops3.mesh.n_vertices), 0.5)
    J = conformal_field_jet(np.array([0.0, 0.6, 0.8]))
    assert abs(gl_inner_first(s, J)) < 1e-3


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_conformal_trace_vanishes_on_s2(ops2, seed):
    # sum over an orthonormal basis of xi is -(n - 2) int |grad u|^2 = 0 for any field
    s = make_state(ops2, smooth(ops2, seed), 0.4)
    total = sum(gl_inner_second_critical(s, e) for e in np.eye(3))
    g = gradient_field(ops2, s.u)
    scale = 1 + ops2.areas @ np.sum(np.abs(g) ** 2, axis=1)
    assert abs(total) <= 1e-10 * scale


def test_critical_and_general_second_inner_agree_at_critical_point(ops3):
    x = ops3.mesh.vertices
    s, _ = gl_solve(make_state(ops3, x[:, 0] + 1j * x[:, 1], 0.3))
    for xi in np.eye(3):
        a = gl_inner_second_critical(s, xi)
        b = gl_inner_second_general(s, conformal_field_jet(xi))
        assert abs(a - b) <= 0.05 * (1 + abs(b))


def test_snapshot_roundtrip(ops2, tmp_path):
    s = make_state(ops2, smooth(ops2, 3), 0.35)
    save_snapshot(s, tmp_path / "s.json")
    r = load_snapshot(tmp_path / "s.json", ops2)
    assert np.array_equal(r.u, s.u) and r.epsilon == s.epsilon
    r = load_snapshot(tmp_path / "s.json")
    assert np.array_equal(r.u, s.u)
