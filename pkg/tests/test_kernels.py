import os
import subprocess
import sys

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from stab.kernels import hopping


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_hopping_backends_agree(ops2, seed):
    rng = np.random.default_rng(seed)
    m = ops2.mesh
    ei, ej = np.ascontiguousarray(m.edges[:, 0]), np.ascontiguousarray(m.edges[:, 1])
    theta = rng.uniform(-np.pi, np.pi, m.n_edges)
    u = rng.standard_normal(m.n_vertices) + 1j * rng.standard_normal(m.n_vertices)
    a = hopping(ei, ej, ops2.edge_weights, theta, u, use_numba=True)
    b = hopping(ei, ej, ops2.edge_weights, theta, u, use_numba=False)
    assert abs(a[0] - b[0]) <= 1e-12 * abs(b[0])
    assert np.abs(a[1] - b[1]).max() <= 1e-12 * np.abs(b[1]).max()
    assert np.abs(a[2] - b[2]).max() <= 1e-12 * np.abs(b[2]).max()


def test_hopping_value_by_hand():
    ei, ej = np.array([0, 1]), np.array([1, 2])
    w = np.array([2.0, 0.5])
    theta = np.array([np.pi / 2, 0.0])
    u = np.array([1.0, 1j, 3.0])
    total, _, _ = hopping(ei, ej, w, theta, u, want_grad=False)
    # edge 0: |i - i*1|^2 = 0, edge 1: |3 - i|^2 = 10
    assert abs(total - 5.0) < 1e-14


def test_numpy_fallback_selected_by_environment():
    code = ("from stab._backend import backend_name; from stab import ymh; "
            "from stab.geometry import assemble_fem, build_icosphere; "
            "ops = assemble_fem(build_icosphere(2)); "
            "s = ymh.make_state(ops, ymh.bundle_init(ops.mesh, 1), ymh.initial_section(ops), 0.4); "
            "print(backend_name(), repr(ymh.ymh_energy(s)))")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, STAB_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        name, value = r.stdout.split()
        outs[name] = float(value)
    assert set(outs) == {"numpy", "numba"}
    assert abs(outs["numpy"] - outs["numba"]) <= 1e-12 * outs["numpy"]
