import numpy as np
import pytest

from curvdesign.optim import CONVERGED, LINE_SEARCH_FAILED, SolverConfig, minimize


def bowl(a):
    a = np.asarray(a, dtype=float)
    return lambda x: (float((x - a) @ (x - a)), 2 * (x - a))


def rosenbrock(x, a=1.0, b=100.0):
    f = (a - x[0]) ** 2 + b * (x[1] - x[0] ** 2) ** 2
    g = np.array([-2 * (a - x[0]) - 4 * b * x[0] * (x[1] - x[0] ** 2),
                  2 * b * (x[1] - x[0] ** 2)])
    return f, g


def test_quadratic_bowl():
    x, rep = minimize(bowl([1, 2, 3]), np.zeros(3))
    assert rep.status == CONVERGED
    np.testing.assert_allclose(x, [1, 2, 3], atol=1e-8)
    assert rep.gradient_norm <= 1e-6


def test_rosenbrock():
    x, rep = minimize(rosenbrock, np.array([-1.2, 1.0]), config=SolverConfig(gradient_tolerance=1e-9))
    assert rep.converged
    np.testing.assert_allclose(x, [1, 1], atol=1e-5)


def test_infeasible_everywhere_but_start():
    x0 = np.zeros(2)
    x, rep = minimize(bowl([1, 1]), x0, feasible=lambda x: bool(np.all(x == x0)))
    assert rep.status == LINE_SEARCH_FAILED
    np.testing.assert_array_equal(x, x0)


def test_iterates_stay_feasible_and_descend():
    seen = []

    def fun(x):
        f, g = rosenbrock(x)
        seen.append((x.copy(), f))
        return f, g

    feasible = lambda x: x[1] <= 1.2
    x, rep = minimize(fun, np.array([-1.2, 1.0]), feasible=feasible)
    assert all(feasible(p) for p, _ in seen)
    assert rep.converged


def test_monotone_descent_and_determinism():
    history = []

    def fun(x):
        return rosenbrock(x)

    def project(x):
        history.append(fun(x)[0])
        return x

    x1, r1 = minimize(fun, np.array([-1.2, 1.0]), project=project)
    values = list(history)
    history.clear()
    x2, r2 = minimize(fun, np.array([-1.2, 1.0]), project=project)
    assert np.all(np.diff(values) <= 0)
    np.testing.assert_array_equal(x1, x2)
    assert r1.iterations == r2.iterations


def test_max_iterations():
    _, rep = minimize(rosenbrock, np.array([-1.2, 1.0]), config=SolverConfig(max_iterations=3))
    assert rep.status == "MaxIterations" and rep.iterations == 3


@pytest.mark.parametrize("kwargs", [
    {"gradient_tolerance": 0}, {"max_iterations": 0}, {"backtracking_factor": 1.0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)
