"""JSON persistence for lattice YMH states."""
from __future__ import annotations

import json

import numpy as np

from ..geometry import assemble_fem, build_icosphere
from .lattice import LatticeBundle, YMHState, make_state, ymh_degree


def state_to_dict(state: YMHState) -> dict:
    return {
        "meshLevel": int(state.mesh.level),
        "epsilon": float(state.epsilon),
        "degree": ymh_degree(state.bundle),
        "edgePhases": state.bundle.phases.tolist(),
        "re": state.u.real.tolist(),
        "im": state.u.imag.tolist(),
    }


def state_from_dict(doc: dict, ops=None) -> YMHState:
    for key in ("meshLevel", "epsilon", "degree", "edgePhases", "re", "im"):
        if key not in doc:
            raise ValueError(f"state document lacks {key!r}")
    if ops is None:
        ops = assemble_fem(build_icosphere(int(doc["meshLevel"])))
    elif ops.mesh.level != int(doc["meshLevel"]):
        raise ValueError("mesh level mismatch")
    bundle = LatticeBundle(ops.mesh, np.asarray(doc["edgePhases"], dtype=float))
    if ymh_degree(bundle) != int(doc["degree"]):
        raise ValueError("stored degree disagrees with the edge phases")
    u = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    return make_state(ops, bundle, u, float(doc["epsilon"]))


def save_state(state: YMHState, path):
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh)


def load_state(path, ops=None) -> YMHState:
    with open(path) as fh:
        return state_from_dict(json.load(fh), ops)
