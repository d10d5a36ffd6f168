import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stab.geometry import (MAX_LEVEL, MeshError, assemble_fem, build_icosphere, conformal_field_jet,
                           conformal_flow, continuum_gl_energy, gradient_field, interpolate, jet_flow,
                           laplace_spectrum, mesh_from_arrays, pullback_field, pulled_back_metric,
                           random_polynomial_field, read_coo, read_off, rk4_flow, rotation_field_jet,
                           rotation_flow, sphere_quadrature, tangent_frame, write_coo, write_off)
from stab.geometry.flow import locator

unit = st.lists(st.floats(-1, 1), min_size=3, max_size=3).map(np.array).filter(
    lambda v: np.linalg.norm(v) > 0.2).map(lambda v: v / np.linalg.norm(v))


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_icosphere_counts(level):
    m = build_icosphere(level)
    assert m.n_vertices == 10 * 4 ** level + 2
    assert m.n_faces == 20 * 4 ** level
    assert m.n_vertices - m.n_edges + m.n_faces == 2
    assert np.allclose(np.linalg.norm(m.vertices, axis=1), 1.0)
    m.check()


def test_faces_point_outward():
    m = build_icosphere(2)
    assert np.all(np.einsum("fd,fd->f", m.face_normals(), m.face_points()) > 0)


def test_level_out_of_range():
    with pytest.raises(MeshError):
        build_icosphere(MAX_LEVEL + 1)
    with pytest.raises(MeshError):
        build_icosphere(-1)


def test_degenerate_face_rejected():
    m = build_icosphere(1)
    v = m.vertices.copy()
    f = m.faces.copy()
    v[f[0, 1]] = v[f[0, 0]]
    with pytest.raises(MeshError):
        assemble_fem(mesh_from_arrays(v, f))


def test_fem_basic_identities(ops3):
    K, M = ops3.stiffness, ops3.mass
    assert abs(K - K.T).max() < 1e-14
    assert np.abs(K @ np.ones(K.shape[0])).max() < 1e-12
    assert abs(ops3.lumped.sum() - ops3.areas.sum()) < 1e-12
    assert abs(M.sum() - ops3.lumped.sum()) < 1e-12
    assert np.all(ops3.edge_weights > 0)


def test_fem_gradient_of_linear_function(ops3):
    xi = np.array([0.2, -0.5, 0.8])
    g = gradient_field(ops3, ops3.mesh.vertices @ xi)
    # the PL interpolant of a linear function has the tangential part of xi on every face plane
    n = ops3.normals
    expect = xi - np.outer(n @ xi, np.ones(3)) * n
    assert np.abs(g - expect).max() < 1e-12


def test_fem_spectrum_level3():
    rep = laplace_spectrum(assemble_fem(build_icosphere(3)), 9)
    lam = rep.eigenvalues
    assert abs(lam[0]) < 1e-10
    assert np.all(np.abs(lam[1:4] - 2) < 0.01 * 2)
    assert np.all(np.abs(lam[4:9] - 6) < 0.02 * 6)
    assert np.all(rep.residual_norms < 1e-8)


def test_quadrature_moments():
    pts, w = sphere_quadrature(4)
    assert abs(w.sum() - 4 * np.pi) < 1e-8
    assert abs(w @ pts[:, 2] ** 2 - 4 * np.pi / 3) < 1e-8
    assert abs(w @ pts[:, 0] ** 4 - 4 * np.pi / 5) < 1e-7


def test_continuum_energy_of_linear_field():
    pts, w = sphere_quadrature(4)
    # u = x3: int |grad u|^2 / 2 = 4 pi / 3, potential (1 - x3^2)^2 / (4 eps^2)
    eps = 0.5
    E = continuum_gl_energy(lambda y: y[..., 2] + 0j, eps, pts, w)
    pot = (32 * np.pi / 15) / (4 * eps ** 2)
    assert abs(E - (4 * np.pi / 3 + pot)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(unit, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_conformal_flow_group_law(xi, s, t):
    x = build_icosphere(1).vertices
    a = conformal_flow(conformal_flow(x, xi, s), xi, t)
    b = conformal_flow(x, xi, s + t)
    assert np.abs(a - b).max() < 1e-10
    assert np.allclose(np.linalg.norm(b, axis=1), 1.0)


@settings(max_examples=10, deadline=None)
@given(unit, st.floats(-0.5, 0.5))
def test_conformal_flow_matches_rk4(xi, t):
    x = build_icosphere(1).vertices
    J = conformal_field_jet(xi)
    assert np.abs(conformal_flow(x, xi, t) - rk4_flow(J, x, t, steps=64)).max() < 1e-8


def test_rotation_flow_matches_rk4():
    a = np.array([0.3, -0.2, 0.9])
    x = build_icosphere(1).vertices
    assert np.abs(rotation_flow(x, a, 0.7) - rk4_flow(rotation_field_jet(a), x, 0.7)).max() < 1e-8
    assert np.abs(jet_flow(rotation_field_jet(a), x, 0.7) - rotation_flow(x, a, 0.7)).max() < 1e-14


@settings(max_examples=15, deadline=None)
@given(unit)
def test_conformal_jet_identities(xi):
    J = conformal_field_jet(xi)
    x = build_icosphere(1).vertices
    f = x @ xi
    P = np.eye(3) - x[:, :, None] * x[:, None, :]
    # nabla X_xi = -f Id on tangent vectors, Div = -2 f
    assert np.abs(J.grad(x) + f[:, None, None] * P).max() < 1e-12
    assert np.abs(J.div(x) + 2 * f).max() < 1e-12


@settings(max_examples=15, deadline=None)
@given(unit)
def test_rotation_jet_is_killing(a):
    R = rotation_field_jet(a)
    x = build_icosphere(1).vertices
    assert np.abs(R.lie_g(x)).max() < 1e-12
    assert np.abs(R.div(x)).max() < 1e-12


def test_jet_gradient_matches_difference():
    J = conformal_field_jet(np.array([0.0, 0.6, 0.8])) + rotation_field_jet([0.1, 0.4, -0.3])
    x = np.array([0.48, 0.6, 0.64])
    e1, e2 = tangent_frame(x)
    h = 1e-6
    for v in (e1, e2):
        y = lambda s: (x + s * v) / np.linalg.norm(x + s * v)
        P = np.eye(3) - np.outer(x, x)
        num = P @ (J.x(y(h)) - J.x(y(-h))) / (2 * h)
        assert np.abs(num - J.grad(x) @ v).max() < 1e-8
        # same check one order up, for nabla (nabla_X X)
        num = P @ (J.nabla_xx(y(h)) - J.nabla_xx(y(-h))) / (2 * h)
        assert np.abs(num - J.grad_nabla_xx(x) @ v).max() < 1e-7


def test_polynomial_gradient_matches_difference():
    P = random_polynomial_field(3, seed=2)
    x = np.array([0.48, 0.6, 0.64])
    e1, _ = tangent_frame(x)
    h = 1e-6
    y = lambda s: np.cos(s) * x + np.sin(s) * e1
    num = (P(y(h)) - P(y(-h))) / (2 * h)
    assert abs(num - P.tangent_gradient(x) @ e1) < 1e-8


def test_pulled_back_metric_derivative():
    # d/dt g_t(v, v) at t = 0 equals -L_X g(v, v) = 2 f |v|^2 for X_xi
    xi = np.array([0.0, 0.0, 1.0])
    J = conformal_field_jet(xi)
    x = np.array([0.6, 0.0, 0.8])
    v = np.array([0.0, 1.0, 0.0])
    h = 1e-3
    d = (pulled_back_metric(J, x, v, v, h) - pulled_back_metric(J, x, v, v, -h)) / (2 * h)
    assert abs(d - (-(J.lie_g(x) @ v) @ v)) < 1e-5


def test_interpolation_reproduces_vertex_values():
    m = build_icosphere(3)
    u = m.vertices[:, 0] + 2j * m.vertices[:, 2]
    assert np.abs(interpolate(m, u, m.vertices) - u).max() < 1e-12
    assert np.abs(pullback_field(m, u, lambda x: x) - u).max() < 1e-12


def test_point_location_backends_agree():
    m = build_icosphere(3)
    loc = locator(m)
    pts = conformal_flow(m.vertices, np.array([0.0, 0.6, 0.8]), 0.4)
    fa, la = loc.locate(pts, loc.first_face, use_numba=True)
    fb, lb = loc.locate(pts, loc.first_face, use_numba=False)
    assert np.array_equal(fa, fb)
    assert np.abs(la - lb).max() < 1e-14
    assert np.all(la >= -1e-12)


def test_off_and_coo_roundtrip(tmp_path):
    m = build_icosphere(2)
    write_off(m, tmp_path / "m.off")
    r = read_off(tmp_path / "m.off", level=2)
    assert np.array_equal(r.faces, m.faces)
    assert np.array_equal(r.vertices, m.vertices)
    ops = assemble_fem(m)
    write_coo(ops.stiffness, tmp_path / "k.coo")
    K = read_coo(tmp_path / "k.coo", ops.stiffness.shape)
    assert abs(K - ops.stiffness).max() == 0.0


def test_bad_off_header(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("NOPE\n")
    with pytest.raises(MeshError):
        read_off(p)
