"""Triangle mesh topology and Wavefront OBJ input/output.

A :class:`Mesh` is purely combinatorial: faces, edges, adjacency and the
boundary classification. Vertex positions (an *embedding*) are kept apart as
plain ``(n, 3)`` float arrays.
"""
from collections import defaultdict

import numpy as np

from .errors import DegenerateFace, NonManifold, ParseError

__all__ = ["Mesh", "build_mesh", "euler_characteristic", "load_obj", "save_obj"]


def _fmt(x):
    return format(float(x), ".12g")


class Mesh:
    """Immutable triangulated surface topology.

    Attributes
    ----------
    vertex_count : int
    faces : (F, 3) int array
    edges : (E, 2) int array
        Canonical ``(min, max)`` pairs in lexicographic order.
    face_edges : (F, 3) int array
        ``face_edges[f, c]`` is the edge opposite corner ``c`` of face ``f``.
    edge_faces : list of tuple
        The one or two faces incident to each edge.
    vertex_faces, vertex_neighbors : list of int arrays
    boundary_edges, boundary_vertices : int arrays (sorted)
    """

    def __init__(self, faces, vertex_count=None):
        faces = np.asarray(faces, dtype=np.int64)
        if faces.ndim != 2 or faces.shape[1] != 3 or len(faces) == 0:
            raise ValueError("faces must be a non-empty list of index triples")
        if faces.min() < 0:
            raise ValueError("vertex indices must be non-negative")
        n = int(faces.max()) + 1 if vertex_count is None else int(vertex_count)
        if n <= faces.max():
            raise ValueError("vertex_count smaller than largest face index")

        bad = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
        if bad.any():
            f = int(np.flatnonzero(bad)[0])
            raise DegenerateFace(f"face {f} {tuple(faces[f])} repeats a vertex")
        keys = np.sort(faces, axis=1)
        _, first, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)
        if (counts > 1).any():
            f = int(first[np.flatnonzero(counts > 1)[0]])
            raise DegenerateFace(f"face {f} {tuple(faces[f])} is duplicated")

        # corner c is opposite the edge (c+1, c+2)
        half = np.stack([faces[:, [1, 2]], faces[:, [2, 0]], faces[:, [0, 1]]], axis=1)
        half = np.sort(half.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(half, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        face_edges = inverse.reshape(-1, 3)

        edge_faces = [[] for _ in range(len(edges))]
        for f, row in enumerate(face_edges):
            for e in row:
                edge_faces[e].append(f)
        for e, fs in enumerate(edge_faces):
            if len(fs) > 2:
                i, j = edges[e]
                raise NonManifold(f"edge {i}-{j} lies in {len(fs)} faces")

        edge_face_count = np.array([len(fs) for fs in edge_faces])
        boundary_edges = np.flatnonzero(edge_face_count == 1)
        is_bd_vertex = np.zeros(n, dtype=bool)
        is_bd_vertex[edges[boundary_edges].ravel()] = True

        vertex_faces = [[] for _ in range(n)]
        for f, tri in enumerate(faces):
            for v in tri:
                vertex_faces[v].append(f)
        neighbors = [set() for _ in range(n)]
        for i, j in edges:
            neighbors[i].add(int(j))
            neighbors[j].add(int(i))

        for v in range(n):
            if not vertex_faces[v]:
                raise NonManifold(f"vertex {v} is not used by any face")
            _check_link(v, faces, vertex_faces[v], is_bd_vertex[v])

        self.vertex_count = n
        self.faces = faces
        self.edges = edges
        self.face_edges = face_edges
        self.edge_faces = [tuple(fs) for fs in edge_faces]
        self.vertex_faces = [np.array(fs, dtype=np.int64) for fs in vertex_faces]
        self.vertex_neighbors = [np.array(sorted(s), dtype=np.int64) for s in neighbors]
        self.boundary_edges = boundary_edges
        self.boundary_vertices = np.flatnonzero(is_bd_vertex)
        self.interior_vertices = np.flatnonzero(~is_bd_vertex)
        self.is_boundary_vertex = is_bd_vertex
        self._edge_index = {(int(i), int(j)): e for e, (i, j) in enumerate(edges)}
        for arr in (faces, edges, face_edges, boundary_edges, is_bd_vertex):
            arr.setflags(write=False)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def face_count(self):
        return len(self.faces)

    def edge_index(self, i, j):
        """Index of the edge joining ``i`` and ``j`` (order irrelevant)."""
        key = (int(i), int(j)) if i < j else (int(j), int(i))
        try:
            return self._edge_index[key]
        except KeyError:
            raise KeyError(f"no edge {i}-{j}") from None

    def __repr__(self):
        return (f"Mesh(V={self.vertex_count}, E={self.edge_count}, F={self.face_count}, "
                f"boundary V={len(self.boundary_vertices)})")


def _check_link(v, faces, incident, on_boundary):
    # The link of v is the graph formed by the edges opposite v.
    adj = defaultdict(list)
    for f in incident:
        a, b = [int(w) for w in faces[f] if w != v]
        adj[a].append(b)
        adj[b].append(a)
    degrees = [len(x) for x in adj.values()]
    ends = sum(1 for d in degrees if d == 1)
    if any(d > 2 for d in degrees) or ends not in (0, 2):
        raise NonManifold(f"link of vertex {v} is not a disk or half-disk")
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(adj):
        raise NonManifold(f"link of vertex {v} is disconnected")
    if (ends == 2) != bool(on_boundary):
        raise NonManifold(f"link of vertex {v} is inconsistent with its boundary status")


def build_mesh(faces, vertex_count=None):
    """Build and validate a :class:`Mesh` from vertex-index triples."""
    return Mesh(faces, vertex_count)


def euler_characteristic(mesh):
    return mesh.vertex_count - mesh.edge_count + mesh.face_count


def load_obj(path):
    """Read the ``v``/``f`` records of an OBJ file.

    Face entries may use ``v/vt/vn`` syntax; only the vertex index is kept.
    Negative (relative) indices are resolved. Other records are ignored.

    Returns
    -------
    mesh : Mesh
    coords : (n, 3) float array
    """
    verts, faces = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            toks = line.split()
            if not toks or toks[0].startswith("#"):
                continue
            try:
                if toks[0] == "v":
                    if len(toks) < 4:
                        raise ValueError("vertex needs 3 coordinates")
                    verts.append([float(t) for t in toks[1:4]])
                elif toks[0] == "f":
                    if len(toks) != 4:
                        raise ValueError(f"face has {len(toks) - 1} vertices, expected 3")
                    idx = []
                    for t in toks[1:]:
                        k = int(t.split("/")[0])
                        if k == 0:
                            raise ValueError("OBJ indices are 1-based")
                        idx.append(k - 1 if k > 0 else len(verts) + k)
                    faces.append(idx)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not faces:
        raise ParseError(f"{path}: no faces")
    coords = np.array(verts, dtype=float).reshape(-1, 3)
    if np.max(faces) >= len(coords) or np.min(faces) < 0:
        raise ParseError(f"{path}: face index out of range")
    if not np.all(np.isfinite(coords)):
        raise ParseError(f"{path}: non-finite coordinate")
    return build_mesh(faces, vertex_count=len(coords)), coords


def save_obj(path, mesh, coords):
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (mesh.vertex_count, 3):
        raise ValueError(f"expected coordinates of shape ({mesh.vertex_count}, 3), got {coords.shape}")
    lines = [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in coords]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
