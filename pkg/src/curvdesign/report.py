"""Error metrics of a final design and raw distribution exports."""
import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import MissingTargets
from .intrinsic import corner_angles, gaussian_curvatures, metric_from_embedding


@dataclass
class RunMetrics:
    """Mean absolute errors: curvature (rad), fixed positions (m), angles (deg).

    ``A_v`` is None when no vertex is fixed.
    """

    A_K: float
    A_v: float
    A_theta: float
    timings: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def evaluate(mesh, coords, target_vertices, target_values, fixed_vertices=(),
             fixed_positions=None, target_angles=None):
    """Compare an embedded mesh with its design targets.

    Parameters
    ----------
    target_vertices, target_values : curvature targets on V_K
    fixed_vertices, fixed_positions : V_fix and its target coordinates
    target_angles : (F, 3) array of target corner angles in radians
    """
    if target_angles is None:
        raise MissingTargets("target corner angles are required")
    target_vertices = np.asarray(target_vertices, dtype=np.int64).reshape(-1)
    target_values = np.asarray(target_values, dtype=float).reshape(-1)
    if len(target_vertices) != len(target_values):
        raise MissingTargets("curvature targets do not match their vertex list")
    target_angles = np.asarray(target_angles, dtype=float)
    if target_angles.shape != (mesh.face_count, 3):
        raise MissingTargets(f"expected target angles of shape ({mesh.face_count}, 3)")
    fixed_vertices = np.asarray(fixed_vertices, dtype=np.int64).reshape(-1)

    lengths = metric_from_embedding(mesh, coords)
    K = gaussian_curvatures(mesh, lengths)
    A_K = float(np.mean(np.abs(K[target_vertices] - target_values))) if len(target_vertices) else 0.0
    if len(fixed_vertices):
        if fixed_positions is None:
            raise MissingTargets("fixed vertices given without target positions")
        diff = np.asarray(coords)[fixed_vertices] - np.asarray(fixed_positions).reshape(-1, 3)
        A_v = float(np.mean(np.linalg.norm(diff, axis=1)))
    else:
        A_v = None
    angles = corner_angles(mesh, lengths)
    A_theta = math.degrees(float(np.mean(np.abs(angles - target_angles))))
    return RunMetrics(A_K=A_K, A_v=A_v, A_theta=A_theta)


def export_distributions(mesh, coords, target_vertices, target_values, target_angles, path):
    """Write per-vertex curvature and per-corner angle rows to a CSV file.

    Columns: ``quantity,index,corner,value,target`` with ``quantity`` either
    ``curvature`` (``index`` is a vertex, ``corner`` empty) or ``angle``
    (``index`` is a face). Angles are in degrees.
    """
    lengths = metric_from_embedding(mesh, coords)
    K = gaussian_curvatures(mesh, lengths)
    angles = np.degrees(corner_angles(mesh, lengths))
    targets_deg = np.degrees(np.asarray(target_angles, dtype=float))
    fmt = lambda x: format(float(x), ".12g")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "index", "corner", "value", "target"])
        for i, t in zip(np.asarray(target_vertices).reshape(-1), np.asarray(target_values).reshape(-1)):
            w.writerow(["curvature", int(i), "", fmt(K[i]), fmt(t)])
        for f in range(mesh.face_count):
            for c in range(3):
                w.writerow(["angle", f, c, fmt(angles[f, c]), fmt(targets_deg[f, c])])
