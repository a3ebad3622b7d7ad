"""Limited-memory BFGS with a feasibility-guarded backtracking line search.

Both pipeline stages minimise a smooth scalar objective through
:func:`minimize`. Trial points rejected by the ``feasible`` callback are
treated exactly like points failing the Armijo test: the step is halved.
"""
import logging
import time
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

CONVERGED = "Converged"
MAX_ITERATIONS = "MaxIterations"
LINE_SEARCH_FAILED = "LineSearchFailed"


@dataclass(frozen=True)
class SolverConfig:
    gradient_tolerance: float = 1e-6
    max_iterations: int = 10000
    sufficient_decrease: float = 1e-4
    backtracking_factor: float = 0.5
    max_backtracks: int = 60
    memory: int = 10

    def __post_init__(self):
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 < self.backtracking_factor < 1:
            raise ValueError("backtracking_factor must lie in (0, 1)")
        if not 0 < self.sufficient_decrease < 1:
            raise ValueError("sufficient_decrease must lie in (0, 1)")
        if self.max_backtracks < 1 or self.memory < 1:
            raise ValueError("max_backtracks and memory must be at least 1")

    @classmethod
    def from_dict(cls, d):
        return cls(**(d or {}))


@dataclass
class SolveReport:
    status: str
    iterations: int
    value: float
    gradient_norm: float
    wall_time: float
    evaluations: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status == CONVERGED

    def to_dict(self):
        return asdict(self)


def _two_loop(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def minimize(fun, x0, feasible=None, config=None, project=None):
    """Minimise ``fun`` starting from ``x0``.

    Parameters
    ----------
    fun : callable
        ``fun(x) -> (value, gradient)``.
    x0 : array_like
        Feasible starting point.
    feasible : callable, optional
        ``feasible(x) -> bool``; trial points returning False are rejected
        before ``fun`` is evaluated on them.
    config : SolverConfig, optional
    project : callable, optional
        Applied by the caller's request to every accepted iterate (used for
        gauge fixing). The objective is re-evaluated at the projected point.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    cfg = config or SolverConfig()
    t0 = time.perf_counter()
    x = np.array(x0, dtype=float)
    if feasible is not None and not feasible(x):
        raise ValueError("initial point is infeasible")
    f, g = fun(x)
    nfev = 1
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise ValueError("objective is not finite at the initial point")
    pairs = deque(maxlen=cfg.memory)
    status = MAX_ITERATIONS
    it = 0
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm <= cfg.gradient_tolerance:
            status = CONVERGED
            break
        if it >= cfg.max_iterations:
            break
        accepted = None
        saw_infeasible = False
        for attempt in range(2 if pairs else 1):
            if attempt == 0 and pairs:
                d = _two_loop(g, pairs)
                slope = g @ d
                if not slope < 0:
                    continue
                t = 1.0
            else:
                pairs.clear()
                d = -g
                slope = -gnorm * gnorm
                t = min(1.0, 1.0 / gnorm)
            for _ in range(cfg.max_backtracks):
                xt = x + t * d
                if feasible is not None and not feasible(xt):
                    saw_infeasible = True
                    t *= cfg.backtracking_factor
                    continue
                ft, gt = fun(xt)
                nfev += 1
                if np.isfinite(ft) and ft <= f + cfg.sufficient_decrease * t * slope:
                    accepted = (xt, ft, gt)
                    break
                t *= cfg.backtracking_factor
            if accepted is not None:
                break
        if accepted is None:
            status = LINE_SEARCH_FAILED
            break
        xn, fn, gn = accepted
        if project is not None:
            xp = project(xn)
            if xp is not xn:
                xn = np.asarray(xp, dtype=float)
                fn, gn = fun(xn)
                nfev += 1
        s, y = xn - x, gn - g
        sy = s @ y
        if sy > 1e-12 * np.sqrt((s @ s) * (y @ y)) and sy > 0:
            pairs.append((s, y, 1.0 / sy))
        x, f, g = xn, fn, gn
        it += 1
    report = SolveReport(status=status, iterations=it, value=float(f),
                         gradient_norm=float(np.linalg.norm(g)),
                         wall_time=time.perf_counter() - t0, evaluations=nfev)
    if status == LINE_SEARCH_FAILED:
        report.notes["infeasible_trials"] = saw_infeasible
    logger.info("minimize: %s after %d iterations, f=%.6g |g|=%.3g",
                status, it, report.value, report.gradient_norm)
    return x, report
