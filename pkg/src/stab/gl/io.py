"""JSON snapshots of GL states."""
from __future__ import annotations

import json

import numpy as np

from ..geometry import assemble_fem, build_icosphere
from .energy import GLState, make_state


def snapshot_to_dict(state: GLState) -> dict:
    return {
        "meshLevel": int(state.ops.mesh.level),
        "epsilon": float(state.epsilon),
        "realParts": state.u.real.tolist(),
        "imagParts": state.u.imag.tolist(),
    }


def snapshot_from_dict(doc: dict, ops=None) -> GLState:
    for key in ("meshLevel", "epsilon", "realParts", "imagParts"):
        if key not in doc:
            raise ValueError(f"snapshot lacks {key!r}")
    if ops is None:
        ops = assemble_fem(build_icosphere(int(doc["meshLevel"])))
    elif ops.mesh.level != int(doc["meshLevel"]):
        raise ValueError("mesh level mismatch")
    u = np.asarray(doc["realParts"], dtype=float) + 1j * np.asarray(doc["imagParts"], dtype=float)
    return make_state(ops, u, float(doc["epsilon"]))


def save_snapshot(state: GLState, path):
    with open(path, "w") as fh:
        json.dump(snapshot_to_dict(state), fh)


def load_snapshot(path, ops=None) -> GLState:
    with open(path) as fh:
        return snapshot_from_dict(json.load(fh), ops)
