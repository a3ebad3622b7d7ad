"""Circle packings on a mesh and their conformal structures.

A packing assigns a radius ``r_i > 0`` to each vertex and a conformal
structure assigns ``eta_ij`` to each edge. Together they fix the metric via
``l_ij**2 = r_i**2 + r_j**2 + 2 r_i r_j eta_ij``. Optimisation works on
log-radii ``u = log(r)``.
"""
import numpy as np
from scipy import sparse

from .errors import NegativeEta, NoIntersection, TriangleInequalityViolation
from .intrinsic import (
    angle_length_jacobian,
    corner_to_vertex,
    face_lengths,
    triangle_inequality_failures,
    validate_metric,
)


def init_radii(mesh, lengths):
    """Radii ``r_i = min over faces of (l_ij + l_ik - l_jk) / 2``."""
    fl = face_lengths(mesh, validate_metric(mesh, lengths))
    # corner c: adjacent sides are fl[(c+1)%3] and fl[(c+2)%3], opposite is fl[c]
    cand = 0.5 * (np.roll(fl, -1, axis=1) + np.roll(fl, -2, axis=1) - fl)
    radii = np.full(mesh.vertex_count, np.inf)
    np.minimum.at(radii, mesh.faces.ravel(), cand.ravel())
    return radii


def conformal_structure_from(mesh, lengths, radii):
    """``eta_ij = (l_ij**2 - r_i**2 - r_j**2) / (2 r_i r_j)``."""
    lengths = np.asarray(lengths, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if (radii <= 0).any():
        raise ValueError("radii must be positive")
    ri, rj = radii[mesh.edges[:, 0]], radii[mesh.edges[:, 1]]
    eta = (lengths ** 2 - ri ** 2 - rj ** 2) / (2 * ri * rj)
    neg = np.flatnonzero(eta < 0)
    if len(neg):
        i, j = mesh.edges[neg[0]]
        raise NegativeEta(f"eta on edge {i}-{j} is {eta[neg[0]]:.6g} < 0")
    return eta


def packing_lengths(mesh, eta, radii):
    """Edge lengths from a packing, without triangle-inequality checks."""
    ri, rj = radii[mesh.edges[:, 0]], radii[mesh.edges[:, 1]]
    return np.sqrt(ri * ri + rj * rj + 2 * ri * rj * eta)


def metric_from_packing(mesh, eta, radii):
    """Metric induced by a packing; raises if any face violates the triangle inequality."""
    eta = np.asarray(eta, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if (eta < 0).any():
        raise NegativeEta("conformal structure has negative entries")
    if (radii <= 0).any():
        raise ValueError("radii must be positive")
    lengths = packing_lengths(mesh, eta, radii)
    bad = triangle_inequality_failures(mesh, lengths)
    if len(bad):
        raise TriangleInequalityViolation(
            f"packing violates the triangle inequality on face {bad[0]} "
            f"({len(bad)} face(s) in total)", bad)
    return lengths


def intersection_angle(length, r_i, r_j):
    """Angle between the circles of radii ``r_i``, ``r_j`` whose centres are ``length`` apart."""
    c = (length * length - r_i * r_i - r_j * r_j) / (2 * r_i * r_j)
    if abs(c) > 1 + 1e-12:
        raise NoIntersection(f"circles do not intersect (cosine {c:.6g})")
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def dlength_dlogradius(eta, radii, edges, lengths=None):
    """Derivatives of edge lengths w.r.t. the log-radii of their endpoints.

    ``edges`` is an ``(E, 2)`` array (a single pair is accepted too). Returns an
    ``(E, 2)`` array whose columns are ``dl_ij/du_i`` and ``dl_ij/du_j``.
    """
    edges = np.atleast_2d(edges)
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (len(edges),))
    radii = np.asarray(radii, dtype=float)
    ri, rj = radii[edges[:, 0]], radii[edges[:, 1]]
    if lengths is None:
        lengths = np.sqrt(ri * ri + rj * rj + 2 * ri * rj * eta)
    cross = ri * rj * eta
    return np.stack([(ri * ri + cross) / lengths, (rj * rj + cross) / lengths], axis=1)


def length_logradius_jacobian(mesh, eta, radii, lengths=None):
    """Sparse ``(E, V)`` matrix of ``dl_e/du_k``."""
    d = dlength_dlogradius(eta, radii, mesh.edges, lengths)
    ne = mesh.edge_count
    rows = np.concatenate([np.arange(ne), np.arange(ne)])
    cols = np.concatenate([mesh.edges[:, 0], mesh.edges[:, 1]])
    return sparse.csr_matrix((d.T.ravel(), (rows, cols)), shape=(ne, mesh.vertex_count))


def curvature_jacobian(mesh, eta, radii):
    """Sparse ``(V, V)`` matrix ``dK_i/du_j`` for the packing ``(eta, radii)``."""
    lengths = metric_from_packing(mesh, eta, radii)
    dtheta_dl = angle_length_jacobian(mesh, lengths)
    dl_du = length_logradius_jacobian(mesh, eta, radii, lengths)
    return -(corner_to_vertex(mesh) @ dtheta_dl @ dl_du).tocsr()
