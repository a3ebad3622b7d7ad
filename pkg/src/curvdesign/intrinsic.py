"""Intrinsic geometry of a mesh carrying a metric.

A metric is a 1-D array of positive edge lengths indexed like ``mesh.edges``.
Corner angles come from the law of cosines, and Gaussian curvature is the
angle defect at each vertex.
"""
import math

import numpy as np
from scipy import sparse

from .errors import DegenerateEdge, TriangleInequalityViolation
from .mesh import euler_characteristic

COS_CLAMP_TOL = 1e-12
MIN_SINE = 1e-9

ADMISSIBILITY_NOTE = (
    "singleton check only; angle term read as pi - arccos(clip(eta, -1, 1))"
)


def metric_from_embedding(mesh, coords):
    """Euclidean edge lengths of an embedding."""
    coords = np.asarray(coords, dtype=float)
    i, j = mesh.edges.T
    lengths = np.linalg.norm(coords[i] - coords[j], axis=1)
    short = np.flatnonzero(lengths < 1e-12)
    if len(short):
        a, b = mesh.edges[short[0]]
        raise DegenerateEdge(f"edge {a}-{b} has length {lengths[short[0]]:.3g}")
    return lengths


def face_lengths(mesh, lengths):
    """(F, 3) array; column ``c`` holds the length of the edge opposite corner ``c``."""
    return np.asarray(lengths, dtype=float)[mesh.face_edges]


def triangle_inequality_failures(mesh, lengths):
    """Indices of faces whose edge lengths do not form a proper triangle."""
    fl = face_lengths(mesh, lengths)
    a, b, c = fl.T
    ok = (a < b + c) & (b < c + a) & (c < a + b) & (fl > 0).all(axis=1)
    return np.flatnonzero(~ok)


def is_valid_metric(mesh, lengths):
    lengths = np.asarray(lengths, dtype=float)
    return bool(np.all(np.isfinite(lengths))) and len(triangle_inequality_failures(mesh, lengths)) == 0


def validate_metric(mesh, lengths):
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (mesh.edge_count,):
        raise ValueError(f"metric must have {mesh.edge_count} entries, got {lengths.shape}")
    if not np.all(np.isfinite(lengths)):
        raise TriangleInequalityViolation("metric has non-finite lengths")
    bad = triangle_inequality_failures(mesh, lengths)
    if len(bad):
        raise TriangleInequalityViolation(
            f"triangle inequality fails on {len(bad)} face(s), first is face {bad[0]}", bad)
    return lengths


def _corner_cosines(fl):
    # rows (a, b, c) opposite corners 0, 1, 2
    a, b, c = fl.T
    cos0 = (b * b + c * c - a * a) / (2 * b * c)
    cos1 = (c * c + a * a - b * b) / (2 * c * a)
    cos2 = (a * a + b * b - c * c) / (2 * a * b)
    return np.stack([cos0, cos1, cos2], axis=1)


def corner_angles(mesh, lengths):
    """Corner angles in radians, shape (F, 3), aligned with ``mesh.faces``."""
    fl = face_lengths(mesh, validate_metric(mesh, lengths))
    cos = _corner_cosines(fl)
    over = np.abs(cos) > 1 + COS_CLAMP_TOL
    if over.any():
        bad = np.flatnonzero(over.any(axis=1))
        raise TriangleInequalityViolation(f"cosine out of range on face {bad[0]}", bad)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def angle_sums(mesh, angles):
    return np.bincount(mesh.faces.ravel(), weights=np.asarray(angles).ravel(),
                       minlength=mesh.vertex_count)


def curvature_from_angles(mesh, angles):
    base = np.where(mesh.is_boundary_vertex, math.pi, 2 * math.pi)
    return base - angle_sums(mesh, angles)


def gaussian_curvatures(mesh, lengths):
    """Angle-defect Gaussian curvature at every vertex.

    Interior vertices use ``2*pi - sum(angles)``, boundary vertices
    ``pi - sum(angles)``.
    """
    return curvature_from_angles(mesh, corner_angles(mesh, lengths))


def gauss_bonnet_defect(mesh, lengths):
    return float(np.sum(gaussian_curvatures(mesh, lengths)) - 2 * math.pi * euler_characteristic(mesh))


def angle_length_jacobian(mesh, lengths):
    """Sparse derivative of the flattened corner angles w.r.t. edge lengths.

    Returns a ``(3F, E)`` CSR matrix; row ``3*f + c`` is corner ``c`` of face ``f``.
    For a corner with opposite side ``a`` and adjacent sides ``b``, ``c``
    (``b`` opposite the next corner), ``dA/da = a/(2S)``,
    ``dA/db = -a cos(C)/(2S)`` and ``dA/dc = -a cos(B)/(2S)``.
    """
    fl = face_lengths(mesh, validate_metric(mesh, lengths))
    cos = np.clip(_corner_cosines(fl), -1.0, 1.0)
    sin = np.sqrt(1.0 - cos * cos)
    if (sin < MIN_SINE).any():
        bad = np.flatnonzero((sin < MIN_SINE).any(axis=1))
        raise TriangleInequalityViolation(f"near-degenerate face {bad[0]}", bad)
    nf = len(fl)
    # twice the area; identical for every corner of a face
    s2 = fl[:, 1] * fl[:, 2] * sin[:, 0]
    rows, cols, vals = [], [], []
    for c in range(3):
        n1, n2 = (c + 1) % 3, (c + 2) % 3
        a = fl[:, c]
        r = 3 * np.arange(nf) + c
        rows += [r, r, r]
        cols += [mesh.face_edges[:, c], mesh.face_edges[:, n1], mesh.face_edges[:, n2]]
        vals += [a / s2, -a * cos[:, n2] / s2, -a * cos[:, n1] / s2]
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(3 * nf, mesh.edge_count))


def corner_to_vertex(mesh):
    """Sparse ``(V, 3F)`` incidence that sums corner quantities per vertex."""
    nf = mesh.face_count
    return sparse.csr_matrix(
        (np.ones(3 * nf), (mesh.faces.ravel(), np.arange(3 * nf))),
        shape=(mesh.vertex_count, 3 * nf))


def curvature_length_jacobian(mesh, lengths):
    """Sparse ``(V, E)`` matrix of ``dK_i/dl_e``."""
    return -(corner_to_vertex(mesh) @ angle_length_jacobian(mesh, lengths)).tocsr()


def admissibility_singleton_diagnostic(mesh, eta, targets, vertices):
    """Check the conformal admissibility inequality for singleton subsets.

    For each ``i`` in ``vertices`` tests
    ``K_i > -sum(pi - phi_jk) + 2*pi*chi`` where the sum runs over the edges
    opposite ``i`` in its incident faces, ``phi_jk = arccos(clip(eta_jk))``
    and ``chi = 1`` (a single vertex spans no edges or faces).

    ``targets`` is indexable by vertex. Returns a list of
    ``(vertex, lhs, rhs)`` for the vertices where the inequality fails.
    The reading of the angle term is an interpretation, see
    :data:`ADMISSIBILITY_NOTE`.
    """
    eta = np.asarray(eta, dtype=float)
    phi = np.arccos(np.clip(eta, -1.0, 1.0))
    violations = []
    for i in vertices:
        i = int(i)
        link = 0.0
        for f in mesh.vertex_faces[i]:
            c = int(np.flatnonzero(mesh.faces[f] == i)[0])
            link += math.pi - phi[mesh.face_edges[f, c]]
        rhs = -link + 2 * math.pi
        lhs = float(targets[i])
        if not lhs > rhs:
            violations.append((i, lhs, rhs))
    return violations
