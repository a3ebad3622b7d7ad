"""Stage 2: find vertex positions realising a metric.

Minimises, over coordinates ``v`` and a log-scale ``s`` (``beta = exp(s)``)::

    sum_edges (|v_i - v_j|**2 - beta * l_ij**2)**2
        + lambda_v * sum_{i in V_fix} |v_i - vbar_i|**2
        + lambda_c * sum_{i interior} silu(mean_z(neighbours of i) - z_i)

``silu(x) = x / (1 + exp(-x))`` pushes each interior vertex above the mean
height of its neighbours (``convexity="up"``); ``"down"`` flips the sign.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve
from scipy.special import expit

from .optim import SolverConfig, minimize

SILU_MIN = -0.27846454276107380  # min of x * expit(x), at x = -1.2784645


def silu(x):
    return x * expit(x)


def silu_prime(x):
    f = silu(x)
    return f + (1.0 - f) * expit(x)


@dataclass(frozen=True, eq=False)
class EmbedProblem:
    mesh: object
    lengths: np.ndarray
    initial: np.ndarray
    fixed_vertices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    fixed_positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    lambda_v: float = 0.01
    lambda_c: float = 0.0
    optimise_beta: bool = True
    convexity: str = "up"

    def __post_init__(self):
        m = self.mesh
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("lengths", np.asarray(self.lengths, dtype=float).reshape(-1))
        set_("initial", np.asarray(self.initial, dtype=float).reshape(-1, 3))
        set_("fixed_vertices", np.asarray(self.fixed_vertices, dtype=np.int64).reshape(-1))
        set_("fixed_positions", np.asarray(self.fixed_positions, dtype=float).reshape(-1, 3))
        if self.lengths.shape != (m.edge_count,):
            raise ValueError("lengths must have one entry per edge")
        if self.initial.shape != (m.vertex_count, 3):
            raise ValueError("initial embedding must have one point per vertex")
        if len(self.fixed_vertices) != len(self.fixed_positions):
            raise ValueError("fixed_vertices and fixed_positions differ in length")
        if len(self.fixed_vertices) and not (
                0 <= self.fixed_vertices.min() and self.fixed_vertices.max() < m.vertex_count):
            raise ValueError("fixed vertex out of range")
        if not (self.lambda_v >= 0 and self.lambda_c >= 0):
            raise ValueError("lambda_v and lambda_c must be non-negative")
        if self.convexity not in ("up", "down"):
            raise ValueError("convexity must be 'up' or 'down'")

    @property
    def beta_free(self):
        # with nothing pinning positions, optimising beta collapses everything to a point
        return self.optimise_beta and len(self.fixed_vertices) > 0


def neighbour_mean_operator(mesh, vertices):
    """Sparse matrix mapping vertex values to neighbour means at ``vertices``."""
    rows, cols, vals = [], [], []
    for r, i in enumerate(vertices):
        nb = mesh.vertex_neighbors[i]
        rows += [r] * len(nb)
        cols += list(nb)
        vals += [1.0 / len(nb)] * len(nb)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(vertices), mesh.vertex_count))


def convexity_gaps(mesh, coords, vertices=None):
    """``mean z of neighbours - z`` at each interior vertex (or at ``vertices``)."""
    vertices = mesh.interior_vertices if vertices is None else np.asarray(vertices)
    z = np.asarray(coords, dtype=float)[:, 2]
    return neighbour_mean_operator(mesh, vertices) @ z - z[vertices]


class _Stage2:
    """Precomputed operators for repeated objective evaluations."""

    def __init__(self, problem):
        self.p = problem
        self.interior = problem.mesh.interior_vertices
        self.avg = neighbour_mean_operator(problem.mesh, self.interior)
        self.sign = 1.0 if problem.convexity == "up" else -1.0
        self.l2 = problem.lengths ** 2

    def __call__(self, v, s):
        p = self.p
        v = np.asarray(v, dtype=float).reshape(-1, 3)
        beta = np.exp(s)
        i, j = p.mesh.edges.T
        d = v[i] - v[j]
        res = np.einsum("ij,ij->i", d, d) - beta * self.l2
        value = float(res @ res)
        gv = np.zeros_like(v)
        w = 4.0 * res[:, None] * d
        np.add.at(gv, i, w)
        np.add.at(gv, j, -w)
        gs = float(-2.0 * beta * (res @ self.l2))

        if len(p.fixed_vertices) and p.lambda_v > 0:
            diff = v[p.fixed_vertices] - p.fixed_positions
            value += p.lambda_v * float(np.sum(diff * diff))
            np.add.at(gv, p.fixed_vertices, 2.0 * p.lambda_v * diff)

        if p.lambda_c > 0 and len(self.interior):
            z = v[:, 2]
            x = self.sign * (self.avg @ z - z[self.interior])
            value += p.lambda_c * float(np.sum(silu(x)))
            fp = p.lambda_c * self.sign * silu_prime(x)
            gz = self.avg.T @ fp
            gz[self.interior] -= fp
            gv[:, 2] += gz
        return value, gv, gs


def stage2_objective(problem, v, s=0.0):
    """Objective value and flat gradient ``[d/dv (row-major), d/ds]``."""
    value, gv, gs = _Stage2(problem)(v, s)
    return value, np.concatenate([gv.ravel(), [gs]])


def tutte_layout(mesh, boundary_positions=None):
    """Planar fallback embedding: boundary on given positions, interior at neighbour averages.

    Without ``boundary_positions`` the boundary loop is not known in space, so
    boundary vertices are spread on a unit circle in index order. The result
    has ``z = 0`` for interior vertices.
    """
    n = mesh.vertex_count
    bd = mesh.boundary_vertices
    coords = np.zeros((n, 3))
    if boundary_positions is None:
        t = 2 * np.pi * np.arange(len(bd)) / max(len(bd), 1)
        coords[bd, 0], coords[bd, 1] = np.cos(t), np.sin(t)
    else:
        coords[bd] = np.asarray(boundary_positions, dtype=float).reshape(-1, 3)
        coords[bd, 2] = 0.0
    inner = mesh.interior_vertices
    if len(inner) == 0:
        return coords
    L = sparse.lil_matrix((n, n))
    for i in range(n):
        nb = mesh.vertex_neighbors[i]
        L[i, i] = len(nb)
        for j in nb:
            L[i, j] = -1.0
    L = L.tocsr()
    A = L[inner][:, inner]
    B = L[inner][:, bd]
    for k in range(2):
        coords[inner, k] = spsolve(A.tocsc(), -B @ coords[bd, k])
    return coords


def solve_embedding(problem, config=None):
    """Minimise the stage-2 objective from ``problem.initial``.

    Returns
    -------
    coords : (V, 3) array
    beta : float
    report : SolveReport
    """
    config = config or SolverConfig()
    obj = _Stage2(problem)
    nv = problem.mesh.vertex_count

    if problem.beta_free:
        def fun(x):
            value, gv, gs = obj(x[:-1], x[-1])
            return value, np.concatenate([gv.ravel(), [gs]])
        x0 = np.concatenate([problem.initial.ravel(), [0.0]])
    else:
        def fun(x):
            value, gv, _ = obj(x, 0.0)
            return value, gv.ravel()
        x0 = problem.initial.ravel().copy()

    x, report = minimize(fun, x0, config=config)
    if problem.beta_free:
        coords, beta = x[:-1].reshape(nv, 3), float(np.exp(x[-1]))
    else:
        coords, beta = x.reshape(nv, 3), 1.0
    report.notes["beta_optimised"] = bool(problem.beta_free)
    return coords, beta, report
