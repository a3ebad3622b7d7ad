"""CSV files for intermediate results.

Formats::

    curvature   vertex_index,curvature
    packing     vertex_index,radius
    eta         vi,vj,eta
    metric      vi,vj,length

Values are written with 17 significant digits so that a save/load cycle
reproduces the float exactly; stages rerun from these files are bit-identical
to in-memory runs.
"""
import csv

import numpy as np

from .errors import ParseError

_HEADERS = {
    "curvature": ["vertex_index", "curvature"],
    "packing": ["vertex_index", "radius"],
    "eta": ["vi", "vj", "eta"],
    "metric": ["vi", "vj", "length"],
}


def _fmt(x):
    return format(float(x), ".17g")


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read(path, header):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if not rows or [h.strip() for h in rows[0]] != header:
        raise ParseError(f"{path}: expected header {','.join(header)}")
    out = []
    for lineno, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields")
        out.append(row)
    return out


def save_vertex_values(path, vertices, values, kind="curvature"):
    _write(path, _HEADERS[kind], [[int(i), _fmt(v)] for i, v in zip(vertices, values)])


def load_vertex_values(path, kind="curvature"):
    """Return ``(vertices, values)`` arrays."""
    rows = _read(path, _HEADERS[kind])
    try:
        idx = np.array([int(r[0]) for r in rows], dtype=np.int64)
        val = np.array([float(r[1]) for r in rows], dtype=float)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return idx, val


def save_edge_values(path, mesh, values, kind="metric"):
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.edge_count,):
        raise ValueError("need one value per edge")
    _write(path, _HEADERS[kind],
           [[int(i), int(j), _fmt(v)] for (i, j), v in zip(mesh.edges, values)])


def load_edge_values(path, mesh, kind="metric"):
    """Read per-edge values into an array ordered like ``mesh.edges``."""
    rows = _read(path, _HEADERS[kind])
    out = np.full(mesh.edge_count, np.nan)
    for r in rows:
        try:
            e = mesh.edge_index(int(r[0]), int(r[1]))
            out[e] = float(r[2])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from None
    if np.isnan(out).any():
        raise ParseError(f"{path}: {int(np.isnan(out).sum())} edge(s) missing")
    return out


def save_radii(path, radii):
    save_vertex_values(path, range(len(radii)), radii, kind="packing")


def load_radii(path, vertex_count):
    idx, val = load_vertex_values(path, kind="packing")
    if len(idx) and (idx.min() < 0 or idx.max() >= vertex_count):
        raise ParseError(f"{path}: vertex index out of range")
    out = np.full(vertex_count, np.nan)
    out[idx] = val
    if np.isnan(out).any():
        raise ParseError(f"{path}: radii missing for some vertices")
    return out
