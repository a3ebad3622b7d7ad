"""Stage 1: optimise a circle packing so that its metric has the target curvatures.

The objective is the modified Ricci energy plus a penalty on fixed edge
lengths::

    sum_{i in V_K} (K_i - Kbar_i)**2 + lambda_e * sum_{e in E_fix} (l_e**2 - lbar_e**2)**2

Three parameterisations are supported: log-radii ``u`` (default), radii
``r``, and raw edge lengths ``l`` (which gives up conformal-class control).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMetric, TriangleInequalityViolation
from .intrinsic import (
    corner_angles,
    curvature_from_angles,
    curvature_length_jacobian,
    triangle_inequality_failures,
)
from .optim import SolverConfig, minimize
from .packing import length_logradius_jacobian, metric_from_packing, packing_lengths

VARIABLE_MODES = ("u", "r", "l")


def _index_array(x):
    return np.asarray(x if x is not None else [], dtype=np.int64).reshape(-1)


@dataclass(frozen=True, eq=False)
class MetricProblem:
    """Inputs of the metric optimisation.

    ``target_vertices``/``target_values`` form the partial curvature field on
    V_K; ``fixed_edges``/``fixed_lengths`` hold E_fix and its target lengths.
    ``initial_radii`` seeds the ``u`` and ``r`` modes, ``initial_lengths``
    (optional) seeds the ``l`` mode.
    """

    mesh: object
    eta: np.ndarray
    target_vertices: np.ndarray
    target_values: np.ndarray
    fixed_edges: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    fixed_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_e: float = 0.01
    variables: str = "u"
    initial_radii: np.ndarray = None
    initial_lengths: np.ndarray = None

    def __post_init__(self):
        m = self.mesh
        set_ = lambda k, v: object.__setattr__(self, k, v)
        set_("eta", np.asarray(self.eta, dtype=float).reshape(-1))
        set_("target_vertices", _index_array(self.target_vertices))
        set_("target_values", np.asarray(self.target_values, dtype=float).reshape(-1))
        set_("fixed_edges", _index_array(self.fixed_edges))
        set_("fixed_lengths", np.asarray(self.fixed_lengths, dtype=float).reshape(-1))
        if self.eta.shape != (m.edge_count,):
            raise ValueError("eta must have one entry per edge")
        if len(self.target_vertices) != len(self.target_values):
            raise ValueError("target_vertices and target_values differ in length")
        if len(self.target_vertices) and not (
                0 <= self.target_vertices.min() and self.target_vertices.max() < m.vertex_count):
            raise ValueError("target vertex out of range")
        if len(self.fixed_edges) != len(self.fixed_lengths):
            raise ValueError("fixed_edges and fixed_lengths differ in length")
        if len(self.fixed_edges) and not (
                0 <= self.fixed_edges.min() and self.fixed_edges.max() < m.edge_count):
            raise ValueError("fixed edge out of range")
        if (self.fixed_lengths <= 0).any():
            raise ValueError("fixed edge lengths must be positive")
        if not self.lambda_e >= 0:
            raise ValueError("lambda_e must be non-negative")
        if self.variables not in VARIABLE_MODES:
            raise ValueError(f"variables must be one of {VARIABLE_MODES}")
        if self.initial_radii is None:
            set_("initial_radii", np.ones(m.vertex_count))
        set_("initial_radii", np.asarray(self.initial_radii, dtype=float).reshape(-1))
        if self.initial_radii.shape != (m.vertex_count,) or (self.initial_radii <= 0).any():
            raise ValueError("initial_radii must be positive, one per vertex")
        if self.initial_lengths is not None:
            set_("initial_lengths", np.asarray(self.initial_lengths, dtype=float).reshape(-1))

    @property
    def scale_pinned(self):
        """Whether any term fixes the global scale of the metric."""
        return len(self.fixed_edges) > 0 and self.lambda_e > 0


def _lengths_or_raise(problem, radii):
    lengths = packing_lengths(problem.mesh, problem.eta, radii)
    bad = triangle_inequality_failures(problem.mesh, lengths)
    if len(bad):
        raise InvalidMetric(f"packing violates the triangle inequality on face {bad[0]}", bad)
    return lengths


def _objective_from_lengths(problem, lengths):
    """Value and gradient w.r.t. edge lengths."""
    mesh = problem.mesh
    try:
        angles = corner_angles(mesh, lengths)
    except TriangleInequalityViolation as exc:
        raise InvalidMetric(str(exc), exc.faces) from None
    K = curvature_from_angles(mesh, angles)
    vk = problem.target_vertices
    res = K[vk] - problem.target_values
    value = float(res @ res)
    dK_dl = curvature_length_jacobian(mesh, lengths)
    grad = 2.0 * (dK_dl[vk].T @ res) if len(vk) else np.zeros(mesh.edge_count)
    if len(problem.fixed_edges) and problem.lambda_e > 0:
        le = lengths[problem.fixed_edges]
        pen = le * le - problem.fixed_lengths ** 2
        value += problem.lambda_e * float(pen @ pen)
        np.add.at(grad, problem.fixed_edges, problem.lambda_e * 4.0 * pen * le)
    return value, grad


def modified_ricci_energy(problem, u):
    """Sum of squared curvature residuals over the target vertices."""
    lengths = _lengths_or_raise(problem, np.exp(np.asarray(u, dtype=float)))
    K = curvature_from_angles(problem.mesh, corner_angles(problem.mesh, lengths))
    res = K[problem.target_vertices] - problem.target_values
    return float(res @ res)


def stage1_objective(problem, u):
    """Objective value and gradient with respect to the log-radii ``u``."""
    radii = np.exp(np.asarray(u, dtype=float))
    lengths = _lengths_or_raise(problem, radii)
    value, g_l = _objective_from_lengths(problem, lengths)
    dl_du = length_logradius_jacobian(problem.mesh, problem.eta, radii, lengths)
    return value, dl_du.T @ g_l


def _stage1_radii(problem, r):
    value, g_u = stage1_objective(problem, np.log(r))
    return value, g_u / r


def _stage1_lengths(problem, lengths):
    return _objective_from_lengths(problem, lengths)


def _packing_feasible(problem, radii):
    if not np.all(np.isfinite(radii)) or (radii <= 0).any():
        return False
    lengths = packing_lengths(problem.mesh, problem.eta, radii)
    return len(triangle_inequality_failures(problem.mesh, lengths)) == 0


def solve_metric(problem, config=None):
    """Minimise the stage-1 objective.

    Returns
    -------
    lengths : (E,) array
        The optimised metric.
    radii : (V,) array
        The final packing (for the ``l`` mode, the radii of the starting packing).
    report : SolveReport
    """
    config = config or SolverConfig()
    mesh = problem.mesh
    gauge = not problem.scale_pinned
    mode = problem.variables

    if mode == "u":
        x0 = np.log(problem.initial_radii)
        fun = lambda x: stage1_objective(problem, x)
        feasible = lambda x: _packing_feasible(problem, np.exp(x))
        project = (lambda x: x - x.mean()) if gauge else None
    elif mode == "r":
        x0 = problem.initial_radii.copy()
        fun = lambda x: _stage1_radii(problem, x)
        feasible = lambda x: _packing_feasible(problem, x)
        project = (lambda x: x / np.exp(np.log(x).mean())) if gauge else None
    else:
        if problem.initial_lengths is not None:
            x0 = problem.initial_lengths.copy()
        else:
            x0 = packing_lengths(mesh, problem.eta, problem.initial_radii)
        fun = lambda x: _stage1_lengths(problem, x)
        feasible = lambda x: bool(np.all(np.isfinite(x))) and (x > 0).all() and len(
            triangle_inequality_failures(mesh, x)) == 0
        project = (lambda x: x / np.exp(np.log(x).mean())) if gauge else None

    if not feasible(x0):
        bad = triangle_inequality_failures(
            mesh, x0 if mode == "l" else packing_lengths(mesh, problem.eta, np.exp(x0) if mode == "u" else x0))
        raise InvalidMetric("initial state does not define a valid metric", bad)
    if project is not None:
        x0 = project(x0)

    x, report = minimize(fun, x0, feasible=feasible, config=config, project=project)
    report.notes["variables"] = mode
    report.notes["gauge_fixed"] = gauge

    if mode == "u":
        radii = np.exp(x)
        lengths = metric_from_packing(mesh, problem.eta, radii)
    elif mode == "r":
        radii = x
        lengths = metric_from_packing(mesh, problem.eta, radii)
    else:
        radii = problem.initial_radii.copy()
        lengths = x
    return lengths, radii, report
