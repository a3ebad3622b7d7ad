"""End-to-end design runs: input -> conformal structure -> metric -> embedding -> report.

A run is described by a :class:`RunConfig`, serialisable as one flat JSON
document. Each stage can also be run on its own from files written by an
earlier stage (see :mod:`curvdesign.cli`).
"""
import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import csvio
from .embed_opt import EmbedProblem, solve_embedding, tutte_layout
from .errors import ConfigError
from .intrinsic import corner_angles, metric_from_embedding
from .mesh import load_obj, save_obj
from .meshgen import (
    DomeSpec,
    constant_total_targets,
    generate_dome,
    radial_quadratic_targets,
)
from .metric_opt import VARIABLE_MODES, MetricProblem, solve_metric
from .optim import CONVERGED, SolverConfig
from .packing import conformal_structure_from, init_radii, packing_lengths
from .report import evaluate, export_distributions

logger = logging.getLogger(__name__)

# Pipeline stages use a longer quasi-Newton history than the bare solver default;
# the embedding stage is badly conditioned along near-isometric flexes.
STAGE_SOLVER_DEFAULTS = {"gradient_tolerance": 1e-6, "max_iterations": 10000, "memory": 30}


@dataclass
class RunConfig:
    input: str = None
    generator: dict = None
    conformal: str = "regular"
    eta_value: float = 1.0
    eta_file: str = None
    targets: dict = field(default_factory=lambda: {"kind": "constant-total", "total": 0.0})
    target_vertices: object = "interior"
    fixed_edges: object = "boundary"
    fixed_vertices: object = "boundary"
    lambda_e: float = 0.01
    lambda_v: float = 0.01
    lambda_c: float = 0.0
    convexity: str = "up"
    variables: str = "u"
    optimise_beta: bool = True
    embed_init: str = "input"
    target_angles: str = "auto"
    metric_solver: dict = field(default_factory=dict)
    embed_solver: dict = field(default_factory=dict)
    out: str = "out"

    def __post_init__(self):
        if (self.input is None) == (self.generator is None):
            raise ConfigError("exactly one of 'input' and 'generator' must be given")
        if self.conformal not in ("regular", "from-initial", "file"):
            raise ConfigError("conformal must be 'regular', 'from-initial' or 'file'")
        if self.conformal == "file" and not self.eta_file:
            raise ConfigError("conformal 'file' needs eta_file")
        for name in ("lambda_e", "lambda_v", "lambda_c"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.convexity not in ("up", "down"):
            raise ConfigError("convexity must be 'up' or 'down'")
        if self.variables not in VARIABLE_MODES:
            raise ConfigError(f"variables must be one of {VARIABLE_MODES}")
        if self.embed_init not in ("input", "tutte"):
            raise ConfigError("embed_init must be 'input' or 'tutte'")
        if self.target_angles not in ("auto", "regular", "initial"):
            raise ConfigError("target_angles must be 'auto', 'regular' or 'initial'")
        kind = (self.targets or {}).get("kind")
        if kind not in ("constant-total", "per-vertex-file", "radial-quadratic"):
            raise ConfigError(f"unknown targets kind {kind!r}")
        try:
            self.metric_solver_config()
            self.embed_solver_config()
            if self.generator is not None:
                self.dome_spec()
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        base = os.path.dirname(os.path.abspath(path))
        for key in ("input", "eta_file"):
            if d.get(key) and not os.path.isabs(d[key]):
                d[key] = os.path.join(base, d[key])
        t = d.get("targets") or {}
        if t.get("path") and not os.path.isabs(t["path"]):
            d["targets"] = dict(t, path=os.path.join(base, t["path"]))
        return cls.from_dict(d)

    def to_dict(self):
        return asdict(self)

    def dome_spec(self):
        return DomeSpec(**self.generator)

    def metric_solver_config(self):
        return SolverConfig(**{**STAGE_SOLVER_DEFAULTS, **(self.metric_solver or {})})

    def embed_solver_config(self):
        return SolverConfig(**{**STAGE_SOLVER_DEFAULTS, **(self.embed_solver or {})})


@dataclass
class Design:
    """Everything derived from the configuration before optimisation."""

    mesh: object
    coords: np.ndarray
    lengths: np.ndarray
    radii: np.ndarray
    eta: np.ndarray
    target_vertices: np.ndarray
    target_values: np.ndarray
    fixed_edges: np.ndarray
    fixed_vertices: np.ndarray
    target_angles: np.ndarray


def _select(policy, boundary, what):
    if policy == "boundary":
        return np.asarray(boundary, dtype=np.int64)
    if policy == "none" or policy is None:
        return np.zeros(0, dtype=np.int64)
    if isinstance(policy, (list, tuple)):
        return policy
    raise ConfigError(f"bad {what} policy {policy!r}")


def prepare(config):
    """Load or generate the initial design and assemble all targets."""
    if config.generator is not None:
        spec = config.dome_spec()
        mesh, coords = generate_dome(spec)
    else:
        try:
            mesh, coords = load_obj(config.input)
        except OSError as exc:
            raise ConfigError(f"cannot read input {config.input}: {exc}") from None
    lengths = metric_from_embedding(mesh, coords)
    radii = init_radii(mesh, lengths)

    if config.conformal == "regular":
        eta = np.full(mesh.edge_count, float(config.eta_value))
    elif config.conformal == "from-initial":
        eta = conformal_structure_from(mesh, lengths, radii)
    else:
        eta = csvio.load_edge_values(config.eta_file, mesh, kind="eta")

    if config.target_vertices == "interior":
        vk = mesh.interior_vertices
    elif config.target_vertices == "all":
        vk = np.arange(mesh.vertex_count)
    else:
        vk = np.asarray(config.target_vertices, dtype=np.int64)
    t = config.targets
    if t["kind"] == "constant-total":
        values = constant_total_targets(vk, t["total"])
    elif t["kind"] == "radial-quadratic":
        values = radial_quadratic_targets(coords, vk, t["c"], t["b"], t["x0"])
    else:
        vk, values = csvio.load_vertex_values(t["path"], kind="curvature")

    fe = _select(config.fixed_edges, mesh.boundary_edges, "fixed_edges")
    if isinstance(fe, (list, tuple)):
        try:
            fe = [mesh.edge_index(i, j) for i, j in fe]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad fixed_edges entry: {exc}") from None
    fe = np.asarray(fe, dtype=np.int64).reshape(-1)
    fv = np.asarray(_select(config.fixed_vertices, mesh.boundary_vertices, "fixed_vertices"),
                    dtype=np.int64).reshape(-1)

    mode = config.target_angles
    if mode == "auto":
        mode = "initial" if config.conformal == "from-initial" else "regular"
    if mode == "initial":
        target_angles = corner_angles(mesh, lengths)
    elif config.generator is not None:
        flat = DomeSpec(**{**config.generator, "height": 0.0})
        _, plan = generate_dome(flat)
        target_angles = corner_angles(mesh, metric_from_embedding(mesh, plan))
    else:
        target_angles = corner_angles(mesh, packing_lengths(mesh, eta, np.ones(mesh.vertex_count)))

    return Design(mesh, coords, lengths, radii, eta, np.asarray(vk, dtype=np.int64),
                  np.asarray(values, dtype=float), fe, fv, target_angles)


def metric_problem(config, design):
    return MetricProblem(
        mesh=design.mesh, eta=design.eta,
        target_vertices=design.target_vertices, target_values=design.target_values,
        fixed_edges=design.fixed_edges, fixed_lengths=design.lengths[design.fixed_edges],
        lambda_e=config.lambda_e, variables=config.variables,
        initial_radii=design.radii, initial_lengths=design.lengths)


def embed_problem(config, design, lengths):
    if config.embed_init == "tutte":
        bd = design.mesh.boundary_vertices
        initial = tutte_layout(design.mesh, design.coords[bd])
    else:
        initial = design.coords
    return EmbedProblem(
        mesh=design.mesh, lengths=lengths, initial=initial,
        fixed_vertices=design.fixed_vertices, fixed_positions=design.coords[design.fixed_vertices],
        lambda_v=config.lambda_v, lambda_c=config.lambda_c,
        optimise_beta=config.optimise_beta, convexity=config.convexity)


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(_round(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _deterministic(report):
    d = report.to_dict()
    d.pop("wall_time", None)
    return d


def exit_code(*reports):
    return 0 if all(r.status == CONVERGED for r in reports) else 2


def run_stage1(config, design, out):
    t0 = time.perf_counter()
    lengths, radii, report = solve_metric(metric_problem(config, design), config.metric_solver_config())
    elapsed = time.perf_counter() - t0
    if out:
        csvio.save_edge_values(os.path.join(out, "metric.csv"), design.mesh, lengths, kind="metric")
        csvio.save_edge_values(os.path.join(out, "eta.csv"), design.mesh, design.eta, kind="eta")
        csvio.save_radii(os.path.join(out, "packing.csv"), radii)
    return lengths, radii, report, elapsed


def run_stage2(config, design, lengths, out):
    t0 = time.perf_counter()
    coords, beta, report = solve_embedding(embed_problem(config, design, lengths),
                                           config.embed_solver_config())
    elapsed = time.perf_counter() - t0
    if out:
        save_obj(os.path.join(out, "final.obj"), design.mesh, coords)
    return coords, beta, report, elapsed


def run_evaluation(config, design, coords, out=None):
    metrics = evaluate(design.mesh, coords, design.target_vertices, design.target_values,
                       design.fixed_vertices, design.coords[design.fixed_vertices],
                       design.target_angles)
    if out:
        export_distributions(design.mesh, coords, design.target_vertices, design.target_values,
                             design.target_angles, os.path.join(out, "distributions.csv"))
    return metrics


def run_pipeline(config, out=None):
    """Run both stages and write all artefacts to ``out`` (default ``config.out``).

    Files: ``initial.obj``, ``final.obj``, ``metric.csv``, ``eta.csv``,
    ``packing.csv``, ``distributions.csv``, ``report.json`` (deterministic)
    and ``timings.json`` (wall-clock seconds per stage).

    Returns ``(result, exit_code)`` where ``result`` is a dict holding the
    final coordinates, metric, beta, metrics and solver reports.
    """
    out = out if out is not None else config.out
    if out:
        os.makedirs(out, exist_ok=True)
    design = prepare(config)
    if out:
        save_obj(os.path.join(out, "initial.obj"), design.mesh, design.coords)
    lengths, radii, rep1, t1 = run_stage1(config, design, out)
    coords, beta, rep2, t2 = run_stage2(config, design, lengths, out)
    metrics = run_evaluation(config, design, coords, out)
    metrics.timings = {"metric_opt": t1, "embedding_opt": t2}
    metrics.reports = {"metric": rep1.to_dict(), "embedding": rep2.to_dict()}
    code = exit_code(rep1, rep2)
    if out:
        write_json(os.path.join(out, "report.json"), {
            "A_K": metrics.A_K, "A_v": metrics.A_v, "A_theta": metrics.A_theta,
            "beta": beta,
            "metric_report": _deterministic(rep1),
            "embedding_report": _deterministic(rep2),
            "counts": {"vertices": design.mesh.vertex_count, "edges": design.mesh.edge_count,
                       "faces": design.mesh.face_count},
            "config": config.to_dict(),
        })
        write_json(os.path.join(out, "timings.json"), metrics.timings)
    logger.info("A_K=%.3g A_v=%s A_theta=%.3g deg", metrics.A_K, metrics.A_v, metrics.A_theta)
    result = {"design": design, "coords": coords, "lengths": lengths, "radii": radii,
              "beta": beta, "metrics": metrics, "metric_report": rep1, "embedding_report": rep2}
    return result, code
