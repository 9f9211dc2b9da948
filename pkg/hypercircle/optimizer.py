"""
Strictly feasible limited-memory quasi-Newton solver for the angle equations.

The search works on the gradient field alone. Trial points are projected
onto a floor sitting feasibility_margin above each open lower bound, so a
variable that runs into its bound stops there while the others keep
moving. The line search brackets the directional derivative along the
projected path (approximate Wolfe conditions) instead of comparing
function values.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from hypercircle.cellcomplex import Triangulation
from hypercircle.energy import (
    FeasibilityReport,
    TargetData,
    VariableLayout,
    feasibility,
    gradient,
    hyperbolic_excess,
)
from hypercircle.errors import (
    GenusTooLow,
    InitFailure,
    InputError,
    KernelError,
    LineSearchFailure,
    MaxIterExceeded,
    SolveError,
)
from hypercircle.hypkernel import TetraCoords

logger = logging.getLogger(__name__)



@dataclass
class SolveOptions:
    grad_tol: float = 1e-10
    max_iter: int = 1000
    memory: int = 10
    backtrack_shrink: float = 0.5
    feasibility_margin: float = 1e-12
    max_step: float = 2.0
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 60
    init_a1: bool = True
    init_scale: float = 1.5
    init_tries: int = 20
    threads: int = 1

    def __post_init__(self):
        if not self.grad_tol > 0.0:
            raise InputError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_iter < 1:
            raise InputError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.memory < 1:
            raise InputError(f"memory must be at least 1, got {self.memory}")
        if not 0.0 < self.backtrack_shrink < 1.0:
            raise InputError(f"backtrack_shrink must lie in (0, 1), got {self.backtrack_shrink}")
        if not self.feasibility_margin > 0.0:
            raise InputError(f"feasibility_margin must be positive, got {self.feasibility_margin}")


@dataclass
class SolveResult:
    x_star: TetraCoords
    grad_norm: float
    iterations: int
    converged: bool
    trace: List[Dict[str, float]] = field(default_factory=list)
    gradient: Optional[np.ndarray] = None
    report: Optional[FeasibilityReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grad_norm': self.grad_norm,
            'iterations': self.iterations,
            'converged': self.converged,
            'trace_length': len(self.trace),
        }


def default_init(tri: Triangulation, opts: Optional[SolveOptions] = None) -> TetraCoords:
    """a = 1 on E_T^1 (0 elsewhere), b = 1 on V1; scale b by 1.5 until inside TE."""
    opts = opts or SolveOptions()
    edge_class = np.asarray(tri.edge_class)
    a = np.where(edge_class == 1, 1.0 if opts.init_a1 else 0.0, 0.0)
    b = np.zeros(tri.n_vertices)
    v1 = sorted(tri.v1)
    b[v1] = 1.0
    report = None
    for attempt in range(opts.init_tries + 1):
        t = TetraCoords(a.copy(), b.copy())
        report = feasibility(t, tri)
        if report.in_TE:
            if attempt:
                logger.info("initial point inside TE after %d b-scalings", attempt)
            return t
        logger.warning("initial point outside TE (attempt %d, worst slack %.3e); scaling b",
                       attempt, report.min_slack())
        b[v1] *= opts.init_scale
    raise InitFailure(
        f"no feasible initial point after {opts.init_tries} b-scalings",
        {'violations': report.violations[:20], 'violation_count': len(report.violations)},
    )


def two_loop_direction(g: np.ndarray, pairs: Sequence) -> np.ndarray:
    """-H g from the stored (s, y) pairs, oldest first."""
    if not pairs:
        return -g
    q = g.copy()
    alphas = []
    for s, y in reversed(pairs):
        rho = 1.0 / float(y @ s)
        alpha = rho * float(s @ q)
        q -= alpha * y
        alphas.append((alpha, rho))
    s_last, y_last = pairs[-1]
    r = (float(s_last @ y_last) / float(y_last @ y_last)) * q
    for (s, y), (alpha, rho) in zip(pairs, reversed(alphas)):
        beta = rho * float(y @ r)
        r += s * (alpha - beta)
    return -r


class _Problem:
    """Gradient field in the reduced variables y, with x = y[fold]."""

    def __init__(self, tri: Triangulation, target: TargetData, opts: SolveOptions,
                 fold: Optional[np.ndarray]):
        self.tri = tri
        self.target = target
        self.opts = opts
        self.layout = VariableLayout(tri)
        n = self.layout.size
        self.fold = np.arange(n) if fold is None else np.asarray(fold, dtype=int)
        if self.fold.shape != (n,):
            raise InputError(f"fold map has {self.fold.size} entries, expected {n}")
        self.n_reduced = int(self.fold.max()) + 1 if n else 0
        lb_x = self.layout.lower_bounds()
        self.lb = np.full(self.n_reduced, -np.inf)
        np.maximum.at(self.lb, self.fold, lb_x)
        self.floor = self.lb + opts.feasibility_margin
        self.evaluations = 0

    def expand(self, y: np.ndarray) -> np.ndarray:
        return y[self.fold]

    def reduce(self, x: np.ndarray) -> np.ndarray:
        counts = np.bincount(self.fold, minlength=self.n_reduced)
        return np.bincount(self.fold, weights=x, minlength=self.n_reduced) / np.maximum(counts, 1)

    def coords(self, y: np.ndarray) -> TetraCoords:
        return self.layout.unpack(self.expand(y))

    def grad(self, y: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        gx = gradient(self.coords(y), self.tri, self.target, self.opts.threads)
        return np.bincount(self.fold, weights=gx, minlength=self.n_reduced)

    def try_grad(self, y: np.ndarray) -> Optional[np.ndarray]:
        """Gradient at a trial point, or None where the kernel cannot evaluate it."""
        try:
            g = self.grad(y)
        except KernelError as exc:
            logger.debug("trial point rejected: %s", exc)
            return None
        if not np.all(np.isfinite(g)):
            logger.debug("trial point rejected: non-finite gradient")
            return None
        return g

    def project(self, y: np.ndarray) -> np.ndarray:
        return np.maximum(y, self.floor)

    def at_floor(self, y: np.ndarray) -> np.ndarray:
        return (y - self.floor) <= self.opts.feasibility_margin

    def held(self, y: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Variables on their floor that the gradient pushes further down."""
        return self.at_floor(y) & (g > 0.0)

    def steepest(self, y: np.ndarray, g: np.ndarray) -> np.ndarray:
        d = -g
        d[self.held(y, g)] = 0.0
        return d


def _line_search(problem: _Problem, y: np.ndarray, d: np.ndarray, g: np.ndarray):
    """Step along the projected path y(s) = max(y + s d, floor).

    The directional derivative is measured along the projected
    displacement, so clamped components drop out of it.
    """
    opts = problem.opts
    phi0 = float(g @ d)
    s_cap = opts.max_step / max(float(np.max(np.abs(d))), 1e-300)
    s = min(1.0, s_cap)
    lo, hi = 0.0, None
    best = None
    for _ in range(opts.max_line_search):
        y_try = problem.project(y + s * d)
        g_try = problem.try_grad(y_try)
        if g_try is None:
            hi = s
        else:
            dphi = float(g_try @ (y_try - y)) / s
            if dphi < opts.c2 * phi0:
                lo, best = s, (s, y_try, g_try)
                if hi is None and s >= s_cap * (1.0 - 1e-12):
                    return best
            elif dphi > (2.0 * opts.c1 - 1.0) * phi0:
                hi = s
            else:
                return s, y_try, g_try
        if hi is None:
            s = min(2.0 * s, s_cap)
        elif hi - lo <= 1e-16 * max(1.0, hi):
            break
        else:
            s = lo + opts.backtrack_shrink * (hi - lo)
    # fall back to the longest step that still descended
    return best


def minimize(
    tri: Triangulation,
    target: TargetData,
    opts: Optional[SolveOptions] = None,
    x0: Optional[TetraCoords] = None,
    fold: Optional[Sequence[int]] = None,
    callback: Optional[Callable[[int, float], None]] = None,
) -> SolveResult:
    """Find the zero of the angle-equation gradient inside TE.

    fold, when given, maps every variable index to a reduced index so that
    symmetric problems are solved in the quotient (x = y[fold]).
    """
    opts = opts or SolveOptions()
    chi = tri.complex.euler_characteristic
    excess = hyperbolic_excess(target.Theta, chi)
    if excess <= 0.0:
        raise GenusTooLow(
            f"target is not hyperbolic: sum(2pi - Theta) - 2pi chi = {excess:.6g} (chi = {chi})",
            {'excess': excess, 'euler_characteristic': chi},
        )

    problem = _Problem(tri, target, opts, None if fold is None else np.asarray(fold))
    x0 = x0 if x0 is not None else default_init(tri, opts)
    y = problem.project(problem.reduce(problem.layout.pack(x0)))
    g = problem.grad(y)
    pairs: deque = deque(maxlen=opts.memory)
    trace: List[Dict[str, float]] = []

    def result(converged: bool, iterations: int, gnorm: float) -> SolveResult:
        t = problem.coords(y)
        gx = gradient(t, tri, target, opts.threads)
        return SolveResult(t, gnorm, iterations, converged, trace, gx, feasibility(t, tri))

    held = problem.held(y, g)
    gnorm = float(np.linalg.norm(g[~held]))
    for it in range(opts.max_iter + 1):
        if callback is not None:
            callback(it, gnorm)
        if gnorm <= opts.grad_tol:
            res = result(True, it, gnorm)
            if not res.report.in_TE:
                raise SolveError(
                    "gradient vanished outside TE",
                    {'violations': res.report.violations[:20], 'grad_norm': gnorm},
                )
            logger.info("converged after %d iterations, |g| = %.3e (%d gradient evaluations)",
                        it, gnorm, problem.evaluations)
            return res
        if it == opts.max_iter:
            break

        d = two_loop_direction(g, list(pairs))
        d[held] = 0.0
        d[problem.at_floor(y) & (d < 0.0)] = 0.0
        if float(g @ d) >= 0.0:
            logger.debug("iteration %d: not a descent direction, resetting memory", it)
            pairs.clear()
            d = problem.steepest(y, g)

        found = _line_search(problem, y, d, g)
        if found is None and pairs:
            logger.debug("iteration %d: line search failed, retrying along -g", it)
            pairs.clear()
            found = _line_search(problem, y, problem.steepest(y, g), g)
        if found is None:
            res = result(False, it, gnorm)
            raise LineSearchFailure(
                f"line search failed at iteration {it} (|g| = {gnorm:.3e})",
                res, {'iteration': it, 'grad_norm': gnorm},
            )
        step, y_new, g_new = found
        held_new = problem.held(y_new, g_new)
        if not np.array_equal(held_new, held):
            logger.debug("iteration %d: %d variables held at their bound", it + 1, int(held_new.sum()))
            pairs.clear()
        else:
            s_vec, y_vec = y_new - y, g_new - g
            sy = float(s_vec @ y_vec)
            if sy > 1e-12 * float(np.linalg.norm(s_vec) * np.linalg.norm(y_vec)):
                pairs.append((s_vec, y_vec))
        y, g, held = y_new, g_new, held_new
        gnorm = float(np.linalg.norm(g[~held]))
        trace.append({'iteration': it + 1, 'grad_norm': gnorm, 'step': step})
        logger.debug("iteration %d: |g| = %.6e, step = %.3e", it + 1, gnorm, step)

    res = result(False, opts.max_iter, gnorm)
    raise MaxIterExceeded(
        f"no convergence within {opts.max_iter} iterations (|g| = {gnorm:.3e})",
        res, {'iterations': opts.max_iter, 'grad_norm': gnorm, 'violations': res.report.violations[:20]},
    )
