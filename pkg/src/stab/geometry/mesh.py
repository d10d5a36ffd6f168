"""Geodesic icosphere triangulations of the unit sphere."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_LEVEL = 8


class MeshError(ValueError):
    pass


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangulated unit sphere.

    Faces are counterclockwise seen from outside. Edges are stored once as
    (i, j) with i < j, sorted lexicographically; that stored direction is the
    canonical orientation used by edge-based fields.
    """

    vertices: np.ndarray
    faces: np.ndarray
    edges: np.ndarray
    level: int
    # face_edges[f, k] is the edge joining faces[f, k] -> faces[f, (k+1)%3];
    # face_edge_sign is +1 when that traversal agrees with the stored edge.
    face_edges: np.ndarray = field(repr=False)
    face_edge_sign: np.ndarray = field(repr=False)
    # face_adj[f, k] is the face across the edge opposite to faces[f, k].
    face_adj: np.ndarray = field(repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_edges(self):
        return len(self.edges)

    def face_areas(self):
        p = self.vertices[self.faces]
        cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        return 0.5 * np.linalg.norm(cr, axis=1)

    def face_normals(self):
        """Unit outward normals of the face planes."""
        p = self.vertices[self.faces]
        cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        return cr / np.linalg.norm(cr, axis=1)[:, None]

    def face_points(self):
        """Face centroids projected radially onto the sphere."""
        c = self.vertices[self.faces].mean(axis=1)
        return c / np.linalg.norm(c, axis=1)[:, None]

    def total_area(self):
        return float(self.face_areas().sum())

    def check(self):
        """Raise MeshError if a structural invariant fails."""
        nv, ne, nf = self.n_vertices, self.n_edges, self.n_faces
        if nv - ne + nf != 2:
            raise MeshError(f"Euler characteristic {nv - ne + nf} != 2")
        if np.abs(np.linalg.norm(self.vertices, axis=1) - 1.0).max() > 1e-14:
            raise MeshError("vertex off the unit sphere")
        counts = np.bincount(self.face_edges.ravel(), minlength=ne)
        if np.any(counts != 2):
            raise MeshError("edge not shared by exactly two faces")
        # each stored edge must be traversed once in each direction
        plus = np.bincount(self.face_edges.ravel(),
                           weights=(self.face_edge_sign.ravel() > 0), minlength=ne)
        if np.any(plus != 1):
            raise MeshError("inconsistent face orientation")
        p = self.vertices[self.faces]
        cr = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        if np.any(np.einsum("ij,ij->i", cr, p.mean(axis=1)) <= 0):
            raise MeshError("face not counterclockwise from outside")


def _icosahedron():
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    v = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v, f


def _edge_table(faces):
    """Unique sorted edges plus per-face edge indices and signs."""
    a = faces
    b = np.roll(faces, -1, axis=1)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    keys = np.stack([lo.ravel(), hi.ravel()], axis=1)
    edges, inv = np.unique(keys, axis=0, return_inverse=True)
    face_edges = inv.reshape(faces.shape)
    sign = np.where(a < b, 1, -1).astype(np.int8)
    return edges, face_edges, sign


def _face_adjacency(faces, face_edges, n_edges):
    # two incident faces per edge, in increasing face order
    flat = face_edges.ravel()
    order = np.argsort(flat, kind="stable")
    owners = (order // 3).reshape(n_edges, 2)
    # edge opposite to vertex k is the edge (k+1 -> k+2), i.e. face_edges[:, (k+1)%3]
    opp = face_edges[:, [1, 2, 0]]
    f_idx = np.arange(len(faces))[:, None]
    first = owners[opp, 0]
    second = owners[opp, 1]
    return np.where(first == f_idx, second, first)


def _subdivide(v, f):
    edges, face_edges, _ = _edge_table(f)
    mid = v[edges[:, 0]] + v[edges[:, 1]]
    mid /= np.linalg.norm(mid, axis=1)[:, None]
    nv = len(v)
    m = face_edges + nv  # m[:,0] = mid(a,b), m[:,1] = mid(b,c), m[:,2] = mid(c,a)
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    ab, bc, ca = m[:, 0], m[:, 1], m[:, 2]
    nf = np.stack([
        np.stack([a, ab, ca], 1),
        np.stack([b, bc, ab], 1),
        np.stack([c, ca, bc], 1),
        np.stack([ab, bc, ca], 1),
    ], axis=1).reshape(-1, 3)
    return np.vstack([v, mid]), nf


def build_icosphere(level: int) -> TriMesh:
    """Icosahedron refined `level` times by 1-to-4 splits, midpoints reprojected."""
    if not isinstance(level, (int, np.integer)) or level < 0 or level > MAX_LEVEL:
        raise MeshError(f"level must be an integer in [0, {MAX_LEVEL}], got {level!r}")
    v, f = _icosahedron()
    for _ in range(int(level)):
        v, f = _subdivide(v, f)
    # renormalize once more so every vertex is unit to rounding
    v = v / np.linalg.norm(v, axis=1)[:, None]
    return mesh_from_arrays(v, f, level=int(level))


def mesh_from_arrays(vertices, faces, level=-1) -> TriMesh:
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    edges, face_edges, sign = _edge_table(faces)
    adj = _face_adjacency(faces, face_edges, len(edges))
    mesh = TriMesh(
        vertices=_frozen(vertices), faces=_frozen(faces), edges=_frozen(edges),
        level=level, face_edges=_frozen(face_edges), face_edge_sign=_frozen(sign),
        face_adj=_frozen(adj),
    )
    return mesh
