import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from conftest import assert_gradient_close, central_difference, random_small_mesh
from curvdesign.embed_opt import (
    SILU_MIN,
    EmbedProblem,
    convexity_gaps,
    silu,
    silu_prime,
    solve_embedding,
    stage2_objective,
    tutte_layout,
)
from curvdesign.intrinsic import metric_from_embedding
from curvdesign.meshgen import DomeSpec, generate_hex_dome
from curvdesign.optim import SolverConfig


def test_silu_values():
    assert silu(0.0) == 0.0
    assert silu(10.0) == pytest.approx(9.999546, abs=1e-6)
    assert silu(-10.0) == pytest.approx(-4.5398e-4, rel=1e-4)
    x = np.linspace(-6, 6, 2001)
    assert silu(x).min() == pytest.approx(SILU_MIN, abs=1e-6)


@pytest.mark.parametrize("x", [-8.0, -1.3, 0.0, 0.7, 5.0])
def test_silu_prime(x):
    h = 1e-6
    assert silu_prime(x) == pytest.approx((silu(x + h) - silu(x - h)) / (2 * h), rel=1e-7, abs=1e-10)


def test_exact_embedding_is_a_zero(tetra):
    m, coords = tetra
    p = EmbedProblem(m, metric_from_embedding(m, coords), coords, [0, 1], coords[[0, 1]])
    value, grad = stage2_objective(p, coords, 0.0)
    assert value == pytest.approx(0.0, abs=1e-28)
    np.testing.assert_allclose(grad, 0.0, atol=1e-14)


def _random_problem(rng, lambda_c=0.7, convexity="up"):
    m, coords = random_small_mesh(rng)
    L = metric_from_embedding(m, coords) * rng.uniform(0.95, 1.05, m.edge_count)
    fixed = m.boundary_vertices
    target = coords[fixed] + rng.normal(0, 0.05, (len(fixed), 3))
    p = EmbedProblem(m, L, coords, fixed, target, lambda_v=0.4, lambda_c=lambda_c, convexity=convexity)
    return p, coords


@pytest.mark.parametrize("seed,convexity", [(0, "up"), (1, "down"), (2, "up")])
def test_gradient_matches_finite_differences(seed, convexity):
    rng = np.random.default_rng(seed)
    p, coords = _random_problem(rng, convexity=convexity)
    v = coords + rng.normal(0, 0.05, coords.shape)
    x = np.concatenate([v.ravel(), [0.1]])
    f = lambda y: stage2_objective(p, y[:-1], y[-1])[0]
    _, g = stage2_objective(p, v, 0.1)
    assert_gradient_close(g, central_difference(f, x))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    m, coords = random_small_mesh(rng)
    L = metric_from_embedding(m, coords) * rng.uniform(0.9, 1.1, m.edge_count)
    p = EmbedProblem(m, L, coords)
    R = Rotation.random(random_state=seed).as_matrix()
    moved = coords @ R.T + rng.normal(0, 3, 3)
    assert stage2_objective(p, moved)[0] == pytest.approx(stage2_objective(p, coords)[0], rel=1e-9, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 5.0))
def test_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    m, coords = random_small_mesh(rng)
    L = metric_from_embedding(m, coords) * rng.uniform(0.9, 1.1, m.edge_count)
    p = EmbedProblem(m, L, coords)
    base = stage2_objective(p, coords, 0.3)[0]
    scaled = stage2_objective(p, c * coords, 0.3 + 2 * math.log(c))[0]
    assert scaled == pytest.approx(c ** 4 * base, rel=1e-9)


def test_regular_tetrahedron_recovered(tetra):
    m, coords = tetra
    L = metric_from_embedding(m, coords)
    rng = np.random.default_rng(0)
    start = coords + rng.uniform(-0.1, 0.1, coords.shape)
    p = EmbedProblem(m, L, start)
    out, beta, rep = solve_embedding(p, SolverConfig(gradient_tolerance=1e-12))
    assert rep.converged and beta == 1.0
    assert np.abs(metric_from_embedding(m, out) - L).max() < 1e-6


def test_flat_patch_interior_returns_home():
    m, coords = generate_hex_dome(DomeSpec(n=2, span=4, height=0))
    L = metric_from_embedding(m, coords)
    bd = m.boundary_vertices
    inner = m.interior_vertices
    start = coords.copy()
    rng = np.random.default_rng(1)
    start[inner] += rng.uniform(-0.05, 0.05, (len(inner), 3))
    p = EmbedProblem(m, L, start, bd, coords[bd])
    out, beta, rep = solve_embedding(p, SolverConfig(gradient_tolerance=1e-10, memory=30))
    assert rep.converged and rep.value < 1e-12
    assert beta == pytest.approx(1.0, abs=1e-6)
    # the centre returns to the centroid of its neighbours in plan
    np.testing.assert_allclose(out[0, :2], out[m.vertex_neighbors[0], :2].mean(axis=0), atol=1e-6)
    assert np.abs(out[:, :2] - coords[:, :2]).max() < 1e-6
    # out-of-plane offsets only change lengths at second order, so they are soft
    assert np.abs(out[:, 2]).max() < 1e-2


def test_beta_fixed_without_anchors(tetra):
    m, coords = tetra
    p = EmbedProblem(m, metric_from_embedding(m, coords), coords, optimise_beta=True)
    assert not p.beta_free
    _, beta, rep = solve_embedding(p)
    assert beta == 1.0 and rep.notes["beta_optimised"] is False


def test_convexity_reward_lifts_interior():
    m, coords = generate_hex_dome(DomeSpec(n=3, span=6, height=0.2))
    L = metric_from_embedding(m, coords)
    bd = m.boundary_vertices
    p0 = EmbedProblem(m, L, coords, bd, coords[bd], lambda_c=0.0)
    p1 = EmbedProblem(m, L, coords, bd, coords[bd], lambda_c=1.0)
    cfg = SolverConfig(memory=30)
    g0 = convexity_gaps(m, solve_embedding(p0, cfg)[0])
    g1 = convexity_gaps(m, solve_embedding(p1, cfg)[0])
    assert g1.max() < g0.max()


def test_convexity_gaps_on_cap():
    m, coords = generate_hex_dome(DomeSpec(n=4, span=10, height=2))
    assert np.all(convexity_gaps(m, coords) < 0)
    flipped = coords * [1, 1, -1]
    assert np.all(convexity_gaps(m, flipped) > 0)


def test_tutte_layout_reproduces_flat_patch():
    m, coords = generate_hex_dome(DomeSpec(n=3, span=6, height=0))
    bd = m.boundary_vertices
    out = tutte_layout(m, coords[bd])
    # uniform weights reproduce a regular lattice exactly
    np.testing.assert_allclose(out, coords, atol=1e-12)


def test_tutte_layout_default_circle():
    m, _ = generate_hex_dome(DomeSpec(n=2))
    out = tutte_layout(m)
    r = np.linalg.norm(out[m.boundary_vertices, :2], axis=1)
    np.testing.assert_allclose(r, 1.0)
    assert np.all(np.linalg.norm(out[m.interior_vertices, :2], axis=1) < 1.0)


def test_problem_validation(tetra):
    m, coords = tetra
    L = metric_from_embedding(m, coords)
    with pytest.raises(ValueError):
        EmbedProblem(m, L[:3], coords)
    with pytest.raises(ValueError):
        EmbedProblem(m, L, coords, [7], [[0, 0, 0]])
    with pytest.raises(ValueError):
        EmbedProblem(m, L, coords, convexity="sideways")
