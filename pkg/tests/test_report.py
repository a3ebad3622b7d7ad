import csv
import math

import numpy as np
import pytest

from curvdesign.errors import MissingTargets
from curvdesign.intrinsic import corner_angles, gaussian_curvatures, metric_from_embedding
from curvdesign.mesh import build_mesh
from curvdesign.meshgen import DomeSpec, generate_hex_dome
from curvdesign.report import evaluate, export_distributions


def test_zero_errors_at_targets():
    m, coords = generate_hex_dome(DomeSpec(n=4, span=12, height=3))
    L = metric_from_embedding(m, coords)
    vk = m.interior_vertices
    K = gaussian_curvatures(m, L)
    bd = m.boundary_vertices
    r = evaluate(m, coords, vk, K[vk], bd, coords[bd], corner_angles(m, L))
    assert r.A_K == pytest.approx(0, abs=1e-15)
    assert r.A_v == 0.0 and r.A_theta == pytest.approx(0, abs=1e-12)


def test_angle_error_single_face():
    m = build_mesh([(0, 1, 2)])
    coords = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])  # angles pi/2, pi/4, pi/4
    r = evaluate(m, coords, [], [], target_angles=np.full((1, 3), math.pi / 3))
    assert r.A_theta == pytest.approx((30 + 15 + 15) / 3, rel=1e-12)
    assert r.A_v is None and r.A_K == 0.0


def test_fixed_position_error_is_mean_distance():
    m = build_mesh([(0, 1, 2)])
    coords = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    targets = coords.copy()
    targets[0] += [0, 0, 0.3]
    targets[1] += [0.4, 0, 0]
    r = evaluate(m, coords, [], [], [0, 1, 2], targets, corner_angles(m, metric_from_embedding(m, coords)))
    assert r.A_v == pytest.approx(0.7 / 3)


def test_missing_targets():
    m = build_mesh([(0, 1, 2)])
    coords = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(MissingTargets):
        evaluate(m, coords, [0], [0.1])
    with pytest.raises(MissingTargets):
        evaluate(m, coords, [0, 1], [0.1], target_angles=np.zeros((1, 3)))
    with pytest.raises(MissingTargets):
        evaluate(m, coords, [], [], [0], None, np.zeros((1, 3)))


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_distribution_export_counts(tmp_path):
    m, coords = generate_hex_dome(DomeSpec(n=7, span=30, height=10))
    L = metric_from_embedding(m, coords)
    vk = m.interior_vertices
    path = tmp_path / "d.csv"
    export_distributions(m, coords, vk, np.zeros(len(vk)), corner_angles(m, L), path)
    rows = _rows(path)
    assert rows[0] == ["quantity", "index", "corner", "value", "target"]
    assert sum(r[0] == "curvature" for r in rows) == 127
    assert sum(r[0] == "angle" for r in rows) == 882


def test_flat_disk_curvature_column_zero(tmp_path):
    m, coords = generate_hex_dome(DomeSpec(n=3, span=6, height=0))
    L = metric_from_embedding(m, coords)
    vk = m.interior_vertices
    path = tmp_path / "d.csv"
    export_distributions(m, coords, vk, np.zeros(len(vk)), corner_angles(m, L), path)
    vals = [float(r[3]) for r in _rows(path)[1:] if r[0] == "curvature"]
    assert np.abs(vals).max() < 1e-10
    angles = [float(r[3]) for r in _rows(path)[1:] if r[0] == "angle"]
    np.testing.assert_allclose(angles, 60.0, atol=1e-9)


def test_empty_target_set_keeps_header(tmp_path):
    m = build_mesh([(0, 1, 2)])
    coords = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    path = tmp_path / "d.csv"
    export_distributions(m, coords, [], [], np.zeros((1, 3)), path)
    rows = _rows(path)
    assert rows[0][0] == "quantity" and len(rows) == 1 + 3
