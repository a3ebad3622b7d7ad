import numpy as np
import pytest

from curvdesign.mesh import build_mesh
from curvdesign.meshgen import DomeSpec, generate_hex_dome

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    def _record(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


TETRA_FACES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def regular_tetrahedron():
    coords = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return coords / np.sqrt(8.0)


@pytest.fixture
def tetra():
    return build_mesh(TETRA_FACES), regular_tetrahedron()


@pytest.fixture
def fan():
    """Flat 1-ring of six unit equilateral triangles; vertex 0 is the centre."""
    mesh, coords = generate_hex_dome(DomeSpec(n=1, span=2.0, height=0.0))
    return mesh, coords


def random_small_mesh(rng, jitter=0.15, zscale=0.3):
    """19-vertex hexagonal patch with jittered plan and random heights."""
    mesh, coords = generate_hex_dome(DomeSpec(n=2, span=4.0, height=0.0))
    coords = coords.copy()
    coords[:, :2] += rng.uniform(-jitter, jitter, size=(len(coords), 2))
    coords[:, 2] = rng.uniform(-zscale, zscale, size=len(coords))
    return mesh, coords


def central_difference(fun, x, h=1e-6):
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    for k in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (fun(xp) - fun(xm)) / (2 * h)
    return g


def assert_gradient_close(analytic, numeric, rel=1e-5, abs_small=1e-8, small=1e-3):
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    err = np.abs(analytic - numeric)
    big = np.abs(numeric) >= small
    assert np.all(err[big] <= rel * np.abs(numeric[big])), err[big].max()
    assert np.all(err[~big] <= max(abs_small, 0.0)), err[~big].max() if (~big).any() else 0
