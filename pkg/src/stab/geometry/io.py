"""OFF mesh files and coordinate-list matrix dumps."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .mesh import MeshError, TriMesh, mesh_from_arrays


def write_off(mesh: TriMesh, path):
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_faces} {mesh.n_edges}"]
    lines += [f"{x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.faces.tolist()]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_off(path, level=-1) -> TriMesh:
    with open(path) as fh:
        tokens = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not tokens or tokens[0][0] != "OFF":
        raise MeshError(f"{path}: missing OFF header")
    nv, nf = int(tokens[1][0]), int(tokens[1][1])
    verts = np.array([[float(t) for t in row[:3]] for row in tokens[2:2 + nv]])
    faces = []
    for row in tokens[2 + nv:2 + nv + nf]:
        if int(row[0]) != 3:
            raise MeshError(f"{path}: only triangles are supported")
        faces.append([int(t) for t in row[1:4]])
    return mesh_from_arrays(verts, np.array(faces, dtype=np.int64), level=level)


def write_coo(matrix, path):
    """One 'row col value' line per stored entry, row-major order."""
    m = sp.csr_matrix(matrix)
    m.sort_indices()
    coo = m.tocoo()
    with open(path, "w") as fh:
        for i, j, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            fh.write(f"{i} {j} {v!r}\n")


def read_coo(path, shape):
    data = np.loadtxt(path, ndmin=2)
    if data.size == 0:
        return sp.csr_matrix(shape)
    return sp.csr_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))), shape=shape)
