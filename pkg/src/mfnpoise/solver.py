"""
A compact derivative-free trust-region method built on MFN models.

The method starts from Powell's initial set, refits its quadratic model by
the derivative-free symmetric Broyden update after every change, and
replaces exactly one interpolation point per evaluation. It exists to
exercise the interpolation machinery, not to compete with NEWUOA.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .ballmax import max_abs_quadratic_over_ball, max_quadratic_over_ball
from .core import InterpolationSet, LpBall, QuadraticModel
from .interpolation import NotPoisedError, ResidualError, assemble_kkt, interpolate_sym_broyden
from .lagrange import lagrange_polynomials_numeric
from .powell import powell_initial_set

CONVERGED = "converged"
BUDGET = "budget-exhausted"
STALLED = "stalled"
NONFINITE = "nonfinite-objective"

ETA_LOW, ETA_HIGH = 0.1, 0.7
SHRINK, EXPAND = 0.5, 2.0
SHORT_STEP = 0.1  # steps shorter than this fraction of the radius are not evaluated
MIN_LAGRANGE = 1e-2  # smallest |L_i(x_new)| accepted when choosing the point to drop


@dataclass
class SolverOptions:
    m: int | None = None
    delta0: float = 1.0
    max_evals: int = 500
    gtol: float = 1e-6
    rho_end: float = 1e-8
    delta_max: float | None = None


@dataclass
class SolverState:
    xset: InterpolationSet
    fvals: np.ndarray
    model: QuadraticModel
    radius: float
    best: int
    nfev: int
    history: list = field(default_factory=list)

    @property
    def x_best(self):
        return np.array(self.xset.points[self.best])

    @property
    def f_best(self):
        return float(self.fvals[self.best])


@dataclass
class SolveResult:
    x: np.ndarray
    fun: float
    nfev: int
    status: str
    history: list
    state: SolverState

    def __iter__(self):
        return iter((self.x, self.fun, self.nfev, self.status))


def geometry_improvement_point(xset: InterpolationSet, i, ball: LpBall):
    """
    Maximizer of ``|L_i|`` over ``ball``, the best replacement for point ``i``
    from the point of view of well-poisedness.
    """
    if not 0 <= i < xset.m:
        raise IndexError(f"point index {i} outside [0, {xset.m - 1}]")
    kkt = assemble_kkt(xset)
    if not kkt.poised:
        raise NotPoisedError(f"interpolation set is not poised (condition estimate {kkt.condition:.3e})")
    L = lagrange_polynomials_numeric(xset, kkt)[i]
    return max_abs_quadratic_over_ball(L, ball).witness


def _replacement_order(xset, center, x_new, keep):
    """Indices sorted by distance to ``center`` (farthest first), then |L_i(x_new)|, then index."""
    dist = np.linalg.norm(xset.points - center, axis=1)
    try:
        lag = np.array([abs(L.evaluate(x_new)) for L in lagrange_polynomials_numeric(xset)])
    except (NotPoisedError, ResidualError):
        lag = np.full(xset.m, np.inf)
    tol = 1e-12 * max(1.0, dist.max())
    order = sorted(range(xset.m), key=lambda i: (-round(dist[i] / tol) if tol else 0, -lag[i], i))
    return [i for i in order if i != keep], lag


class _Budget(Exception):
    pass


class _NonFinite(Exception):
    pass


def solve(objective, x0, options: SolverOptions | None = None, callback=None, **kwargs) -> SolveResult:
    """
    Minimize ``objective`` without derivatives.

    Parameters
    ----------
    objective : callable
        ``f(x) -> float``, called sequentially.
    x0 : array_like
        Starting point.
    options : SolverOptions, optional
        Keyword arguments override individual fields.
    callback : callable, optional
        Called with the :class:`SolverState` after every model refit.

    Returns
    -------
    SolveResult
        Unpacks as ``(x, fun, nfev, status)``; ``status`` is one of
        ``converged``, ``budget-exhausted``, ``stalled`` or
        ``nonfinite-objective``.
    """
    opts = options or SolverOptions()
    if kwargs:
        opts = SolverOptions(**{**opts.__dict__, **kwargs})
    x0 = np.asarray(x0, dtype=float).ravel()
    n = x0.size
    m = 2 * n + 1 if opts.m is None else int(opts.m)
    if opts.max_evals < m:
        raise ValueError(f"max_evals must be at least m = {m}, got {opts.max_evals}")
    delta_max = opts.delta_max if opts.delta_max is not None else 1e3 * opts.delta0

    xset = powell_initial_set(n, m, opts.delta0, x0)
    nfev = 0

    def evaluate(x):
        nonlocal nfev
        if nfev >= opts.max_evals:
            raise _Budget
        nfev += 1
        f = float(objective(np.array(x)))
        if not math.isfinite(f):
            raise _NonFinite(f)
        return f

    history = []
    fvals = np.empty(m)
    try:
        for i, y in enumerate(xset.points):
            fvals[i] = evaluate(y)
    except _NonFinite:
        done = nfev - 1  # the failing evaluation never reached fvals
        if done == 0:
            return SolveResult(x0.copy(), math.nan, nfev, NONFINITE, history, None)
        best = int(np.argmin(fvals[:done]))
        return SolveResult(xset.points[best].copy(), float(fvals[best]), nfev, NONFINITE, history, None)

    best = int(np.argmin(fvals))
    xset = xset.with_base(best)
    model = interpolate_sym_broyden(xset, fvals, QuadraticModel.zero(n))
    state = SolverState(xset, fvals, model, float(opts.delta0), best, nfev, history)
    iteration = 0

    def record(step):
        state.nfev = nfev
        history.append({
            "iteration": iteration,
            "evaluations": nfev,
            "best_value": state.f_best,
            "radius": state.radius,
            "step": step,
        })
        if callback is not None:
            callback(state)

    def replace(i, x_new, f_new):
        new_set = state.xset.replace(i, x_new)
        new_f = state.fvals.copy()
        new_f[i] = f_new
        best = i if f_new < state.f_best else state.best
        new_set = new_set.with_base(best)
        model = interpolate_sym_broyden(new_set, new_f, state.model)
        state.xset, state.fvals, state.model, state.best = new_set, new_f, model, best

    def try_replace(order, x_new, f_new):
        for i in order:
            try:
                replace(i, x_new, f_new)
                return True
            except (NotPoisedError, ResidualError):
                continue
        return False

    def geometry_step(center):
        dist = np.linalg.norm(state.xset.points - center, axis=1)
        i = int(np.argmax(dist))
        if dist[i] <= 2.0 * state.radius or i == state.best:
            return False
        try:
            x_geo = geometry_improvement_point(state.xset, i, LpBall(center, state.radius, 2.0))
        except (NotPoisedError, ResidualError):
            return False
        f_geo = evaluate(x_geo)
        if not try_replace([i], x_geo, f_geo):
            return False
        record("geometry")
        return True

    record("init")
    status = BUDGET
    try:
        while True:
            iteration += 1
            xk = state.x_best
            fk = state.f_best
            if state.radius <= opts.rho_end:
                gnorm = np.linalg.norm(state.model.gradient(xk))
                status = CONVERGED if gnorm <= opts.gtol else STALLED
                break
            step = max_quadratic_over_ball(-state.model, LpBall(xk, state.radius, 2.0))
            x_new = step.x
            pred = state.model.evaluate(xk) - state.model.evaluate(x_new)
            short = np.linalg.norm(x_new - xk) < SHORT_STEP * state.radius
            if short or not pred > 1e-15 * max(1.0, abs(fk)):
                # not worth an evaluation: improve the geometry or refine the radius
                if not geometry_step(xk):
                    state.radius *= SHRINK
                    record("shrink")
                continue

            f_new = evaluate(x_new)
            ratio = (fk - f_new) / pred
            order, lag = _replacement_order(state.xset, xk, x_new, keep=state.best)
            order = [i for i in order if lag[i] >= MIN_LAGRANGE] or order
            if not try_replace(order, x_new, f_new):
                state.radius *= SHRINK
                record("rejected")
                continue

            if ratio < ETA_LOW:
                state.radius *= SHRINK
            elif ratio > ETA_HIGH:
                state.radius = min(EXPAND * state.radius, delta_max)
            record("trust")
            if ratio < ETA_LOW:
                geometry_step(state.x_best)
    except _Budget:
        status = BUDGET
    except _NonFinite:
        status = NONFINITE
    state.nfev = nfev
    return SolveResult(state.x_best, state.f_best, nfev, status, history, state)


def history_to_csv(history) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", "evaluations", "best_value", "radius", "step"])
    for row in history:
        writer.writerow([row["iteration"], row["evaluations"], format(row["best_value"], ".17g"), format(row["radius"], ".17g"), row["step"]])
    return buf.getvalue()
