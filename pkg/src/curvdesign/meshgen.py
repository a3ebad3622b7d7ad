"""Parametric dome meshes and target-curvature fields.

Two plan families are provided: a hexagonal patch of the triangular lattice
with ``n`` rings, and an ``n x n`` square grid where every cell is split into
four triangles around a centre vertex. Plans are centred at the origin; the
hexagon has one corner on the +x axis and ``span`` is its corner-to-corner
diameter, the square has side ``span``. The plan is lifted vertically by a
spherical cap or a paraboloid through the plan's circumcircle.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mesh import build_mesh

PROFILES = ("spherical-cap", "paraboloid")


@dataclass(frozen=True)
class DomeSpec:
    plan: str = "hexagon"
    n: int = 7
    span: float = 30.0
    height: float = 10.0
    profile: str = "spherical-cap"

    def __post_init__(self):
        if self.plan not in ("hexagon", "square"):
            raise ValueError("plan must be 'hexagon' or 'square'")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.span > 0:
            raise ValueError("span must be positive")
        if not self.height >= 0:
            raise ValueError("height must be non-negative")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")


def lift(xy, radius, height, profile="spherical-cap"):
    """Heights over plan points for a dome of the given apex height.

    The surface passes through ``z = 0`` on the circle of ``radius`` and
    reaches ``height`` at the origin.
    """
    rho2 = np.sum(np.asarray(xy) ** 2, axis=1)
    if height == 0:
        return np.zeros(len(rho2))
    if profile == "paraboloid":
        return height * (1.0 - rho2 / radius ** 2)
    R = (radius ** 2 + height ** 2) / (2.0 * height)
    return np.sqrt(np.maximum(R * R - rho2, 0.0)) - (R - height)


def _hex_plan(n):
    # axial lattice coordinates (a, b) -> a*e1 + b*e2, e1 = (1, 0), e2 = (1/2, sqrt(3)/2)
    corners = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    pts = [(0, 0)]
    for k in range(1, n + 1):
        # walk ring k counter-clockwise starting from the corner on +x
        a, b = k, 0
        for side in range(6):
            da, db = corners[(side + 2) % 6]
            for _ in range(k):
                pts.append((a, b))
                a, b = a + da, b + db
    index = {p: i for i, p in enumerate(pts)}
    faces = []
    for (a, b), i in index.items():
        for q, r in (((a + 1, b), (a, b + 1)), ((a, b + 1), (a - 1, b + 1))):
            if q in index and r in index:
                faces.append((i, index[q], index[r]))
    ab = np.array(pts, dtype=float)
    xy = np.stack([ab[:, 0] + 0.5 * ab[:, 1], (math.sqrt(3) / 2) * ab[:, 1]], axis=1)
    return xy / n, faces


def generate_hex_dome(spec):
    """Hexagonal-plan dome; vertex 0 is the apex, then rings outward, counter-clockwise.

    Returns ``(mesh, coords)``.
    """
    if spec.plan != "hexagon":
        spec = DomeSpec("hexagon", spec.n, spec.span, spec.height, spec.profile)
    xy, faces = _hex_plan(spec.n)
    radius = spec.span / 2.0
    xy = xy * radius
    coords = np.column_stack([xy, lift(xy, radius, spec.height, spec.profile)])
    return build_mesh(faces, len(coords)), coords


def generate_square_dome(spec):
    """Square-plan dome; grid vertices first (row-major), then cell centres."""
    n = spec.n
    side = spec.span
    g = np.linspace(-side / 2, side / 2, n + 1)
    X, Y = np.meshgrid(g, g)
    grid = np.column_stack([X.ravel(), Y.ravel()])
    c = 0.5 * (g[:-1] + g[1:])
    CX, CY = np.meshgrid(c, c)
    centres = np.column_stack([CX.ravel(), CY.ravel()])
    xy = np.vstack([grid, centres])
    gid = lambda r, q: r * (n + 1) + q
    faces = []
    for r in range(n):
        for q in range(n):
            m = (n + 1) ** 2 + r * n + q
            a, b, cc, d = gid(r, q), gid(r, q + 1), gid(r + 1, q + 1), gid(r + 1, q)
            faces += [(a, b, m), (b, cc, m), (cc, d, m), (d, a, m)]
    radius = side / math.sqrt(2.0)
    coords = np.column_stack([xy, lift(xy, radius, spec.height, spec.profile)])
    return build_mesh(faces, len(coords)), coords


def generate_dome(spec):
    if spec.plan == "hexagon":
        return generate_hex_dome(spec)
    return generate_square_dome(spec)


def constant_total_targets(vertices, total):
    """Split ``total`` curvature evenly over ``vertices``."""
    vertices = np.asarray(vertices)
    if len(vertices) == 0:
        return np.zeros(0)
    return np.full(len(vertices), float(total) / len(vertices))


def radial_quadratic_targets(coords, vertices, c, b, x0):
    """Quadratic curvature profile in the scaled distance from ``(x0, 0)``.

    ``d_i = -sqrt((x_i - x0)**2 + y_i**2) / (2*x0)`` and
    ``K_i = -(2c/b**2) (d_i - b)**2 + c``; the peak ``c`` sits at ``d = b``.
    Raises :class:`DomainError` if some ``d_i`` falls outside ``[0, 1]``.
    """
    coords = np.asarray(coords, dtype=float)
    vertices = np.asarray(vertices, dtype=np.int64)
    x, y = coords[vertices, 0], coords[vertices, 1]
    d = -np.sqrt((x - x0) ** 2 + y ** 2) / (2.0 * x0)
    if len(d) and (d.min() < 0 or d.max() > 1):
        raise DomainError(f"scaled distances span [{d.min():.4g}, {d.max():.4g}], outside [0, 1]")
    return quadratic_profile(d, c, b)


def quadratic_profile(d, c, b):
    d = np.asarray(d, dtype=float)
    return -(2.0 * c / b ** 2) * (d - b) ** 2 + c
