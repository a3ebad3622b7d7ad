"""Command-line interface.

::

    curvdesign generate hexagon n=7 span=30 height=10 --out work/
    curvdesign inspect work/mesh.obj
    curvdesign run --config ex1a.json --out results/
    curvdesign solve-metric --config ex1a.json --out results/
    curvdesign embed --config ex1a.json --metric results/metric.csv --out results/
    curvdesign evaluate --config ex1a.json --mesh results/final.obj --out results/

Config fields may be overridden with ``--set key=value`` (value parsed as
JSON when possible). Log verbosity follows ``CURVDESIGN_LOG`` (e.g. ``INFO``).

Exit codes: 0 when every solver stage converged, 2 when a stage stopped
without converging, 1 on any error.
"""
import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import csvio
from .errors import ConfigError, CurvDesignError
from .intrinsic import (
    ADMISSIBILITY_NOTE,
    admissibility_singleton_diagnostic,
    gauss_bonnet_defect,
    gaussian_curvatures,
    metric_from_embedding,
)
from .mesh import euler_characteristic, load_obj, save_obj
from .meshgen import DomeSpec, constant_total_targets, generate_dome
from .pipeline import (
    RunConfig,
    exit_code,
    prepare,
    run_evaluation,
    run_pipeline,
    run_stage1,
    run_stage2,
    write_json,
)

PLAN_ALIASES = {"hex": "hexagon", "hexagon": "hexagon", "square": "square"}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _key_values(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v)
    return out


def _load_config(args):
    if not args.config:
        raise ConfigError("--config is required")
    cfg = RunConfig.load(args.config)
    overrides = _key_values(args.set)
    if overrides:
        cfg = RunConfig.from_dict({**cfg.to_dict(), **overrides})
    return cfg


def _out_dir(args, cfg=None):
    out = args.out or (cfg.out if cfg is not None else ".")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_generate(args):
    params = _key_values(args.params)
    plan = PLAN_ALIASES.get(args.plan)
    if plan is None:
        raise ConfigError(f"unknown plan {args.plan!r}")
    total = params.pop("total_curvature", None)
    try:
        spec = DomeSpec(plan=plan, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    mesh, coords = generate_dome(spec)
    out = _out_dir(args)
    path = os.path.join(out, args.name)
    save_obj(path, mesh, coords)
    print(f"wrote {path}: {mesh.vertex_count} vertices, {mesh.edge_count} edges, {mesh.face_count} faces")
    if total is not None:
        vk = mesh.interior_vertices
        tpath = os.path.join(out, "targets.csv")
        csvio.save_vertex_values(tpath, vk, constant_total_targets(vk, total))
        print(f"wrote {tpath}")
    return 0


def cmd_inspect(args):
    mesh, coords = load_obj(args.mesh)
    lengths = metric_from_embedding(mesh, coords)
    K = gaussian_curvatures(mesh, lengths)
    chi = euler_characteristic(mesh)
    print(f"vertices            {mesh.vertex_count}")
    print(f"edges               {mesh.edge_count}")
    print(f"faces               {mesh.face_count}")
    print(f"euler               {chi}")
    print(f"boundary vertices   {len(mesh.boundary_vertices)}")
    print(f"boundary edges      {len(mesh.boundary_edges)}")
    print(f"interior curvature  {K[mesh.interior_vertices].sum():.12g}")
    print(f"gauss-bonnet defect {gauss_bonnet_defect(mesh, lengths):.3e}")
    if args.config:
        cfg = _load_config(args)
        design = prepare(cfg)
        targets = np.full(mesh.vertex_count, np.nan)
        targets[design.target_vertices] = design.target_values
        bad = admissibility_singleton_diagnostic(mesh, design.eta, targets, design.target_vertices)
        print(f"admissibility ({ADMISSIBILITY_NOTE}): {len(bad)} violation(s)")
        for i, lhs, rhs in bad[:20]:
            print(f"  vertex {i}: target {lhs:.6g} <= bound {rhs:.6g}")
        total = design.target_values.sum()
        print(f"target total on V_K {total:.12g} (2*pi*chi = {2 * math.pi * chi:.12g})")
    return 0


def cmd_run(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    result, code = run_pipeline(cfg, out)
    m = result["metrics"]
    av = "n/a" if m.A_v is None else f"{m.A_v:.4g}"
    print(f"A_K={m.A_K:.4g} rad  A_v={av} m  A_theta={m.A_theta:.4g} deg  beta={result['beta']:.6g}")
    print(f"metric: {result['metric_report'].status}  embedding: {result['embedding_report'].status}")
    return code


def cmd_solve_metric(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    design = prepare(cfg)
    _, _, report, elapsed = run_stage1(cfg, design, out)
    d = report.to_dict()
    d.pop("wall_time")
    write_json(os.path.join(out, "metric_report.json"), {"report": d, "config": cfg.to_dict()})
    print(f"metric: {report.status} after {report.iterations} iterations ({elapsed:.2f} s)")
    return exit_code(report)


def cmd_embed(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    design = prepare(cfg)
    lengths = csvio.load_edge_values(args.metric, design.mesh, kind="metric")
    _, beta, report, elapsed = run_stage2(cfg, design, lengths, out)
    d = report.to_dict()
    d.pop("wall_time")
    write_json(os.path.join(out, "embed_report.json"), {"report": d, "beta": beta})
    print(f"embedding: {report.status} after {report.iterations} iterations ({elapsed:.2f} s), beta={beta:.6g}")
    return exit_code(report)


def cmd_evaluate(args):
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    design = prepare(cfg)
    mesh, coords = load_obj(args.mesh)
    if not np.array_equal(mesh.faces, design.mesh.faces):
        raise ConfigError("evaluated mesh does not share the configured mesh's faces")
    metrics = run_evaluation(cfg, design, coords, out)
    write_json(os.path.join(out, "evaluation.json"),
               {"A_K": metrics.A_K, "A_v": metrics.A_v, "A_theta": metrics.A_theta})
    av = "n/a" if metrics.A_v is None else f"{metrics.A_v:.4g}"
    print(f"A_K={metrics.A_K:.4g} rad  A_v={av} m  A_theta={metrics.A_theta:.4g} deg")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="curvdesign", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def staged(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE")
        sp.set_defaults(func=func)
        return sp

    g = sub.add_parser("generate", help="write a parametric dome mesh")
    g.add_argument("plan", help="hex | square")
    g.add_argument("params", nargs="*", metavar="KEY=VALUE",
                   help="n, span, height, profile, total_curvature")
    g.add_argument("--out")
    g.add_argument("--name", default="mesh.obj")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("inspect", help="print mesh statistics")
    i.add_argument("mesh")
    i.add_argument("--config", help="also run the admissibility diagnostic for this config")
    i.add_argument("--set", action="append", metavar="KEY=VALUE")
    i.set_defaults(func=cmd_inspect)

    staged("run", cmd_run, "run the full pipeline")
    staged("solve-metric", cmd_solve_metric, "stage 1 only")
    e = staged("embed", cmd_embed, "stage 2 only, from a metric CSV")
    e.add_argument("--metric", required=True)
    v = staged("evaluate", cmd_evaluate, "error metrics of an embedded mesh")
    v.add_argument("--mesh", required=True)
    return p


def main(argv=None):
    level = os.environ.get("CURVDESIGN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CurvDesignError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
