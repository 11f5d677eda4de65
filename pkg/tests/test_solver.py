import math

import numpy as np
import pytest

from mfnpoise.core import InterpolationSet, LpBall
from mfnpoise.interpolation import NotPoisedError, is_poised
from mfnpoise.poisedness import poisedness_constant_numeric, random_poised_set
from mfnpoise.powell import powell_initial_set
from mfnpoise.solver import (
    BUDGET,
    CONVERGED,
    NONFINITE,
    SolverOptions,
    geometry_improvement_point,
    history_to_csv,
    solve,
)
from mfnpoise.testfuncs import get_function


class Recorder:
    """Objective wrapper counting calls and checking each iteration's state."""

    def __init__(self, fun):
        self.fun = fun
        self.calls = 0
        self.values = []
        self.states = []

    def __call__(self, x):
        self.calls += 1
        f = self.fun(x)
        self.values.append(f)
        return f

    def callback(self, state):
        self.states.append((np.array(state.xset.points), np.array(state.fvals), state.model, state.f_best, state.nfev))


def run(name, n, x0, max_evals, **kw):
    prob = get_function(name, n)
    rec = Recorder(prob.fun)
    res = solve(rec, x0, SolverOptions(max_evals=max_evals, **kw), callback=rec.callback)
    return prob, rec, res


def test_sphere_reaches_target():
    _, rec, res = run("sphere", 3, [1, 1, 1], 100)
    assert res.fun <= 1e-8 and res.nfev <= 100


def test_convex_quadratic_with_cross_terms():
    prob, rec, res = run("quadratic-crossterms", 2, [0, 0], 200)
    assert res.fun - prob.minimum <= 1e-6


def test_rosenbrock():
    _, rec, res = run("rosenbrock", 2, [-1.2, 1], 500)
    assert res.fun <= 1e-4
    assert res.status == CONVERGED


@pytest.mark.parametrize("name, n", [("sphere", 3), ("rosenbrock", 2), ("quadratic-crossterms", 4), ("rosenbrock", 4)])
def test_invariants(name, n):
    _, rec, res = run(name, n, np.full(n, 0.5), 300)
    m = 2 * n + 1
    # budget honesty and initialization cost
    assert rec.calls == res.nfev <= 300
    assert rec.states[0][4] == m
    prev = None
    for pts, f, model, fbest, nfev in rec.states:
        # interpolation invariant
        assert np.max(np.abs(model.evaluate(pts) - f)) <= 1e-8 * (1 + np.max(np.abs(f)))
        # best value is the minimum over all evaluations so far
        assert fbest == min(rec.values[:nfev])
        if prev is not None:
            changed = np.sum(np.any(pts != prev, axis=1))
            assert changed <= 1
        prev = pts
    best = [s[3] for s in rec.states]
    assert all(a >= b for a, b in zip(best, best[1:]))


def test_budget_exhausted():
    _, rec, res = run("rosenbrock", 3, [-1, 1, -1], 20)
    assert res.status == BUDGET and rec.calls == 20


def test_budget_below_m():
    with pytest.raises(ValueError):
        solve(lambda x: 0.0, np.zeros(3), max_evals=5)


def test_nonfinite_objective():
    def f(x):
        return math.nan if x[0] > 0.5 else float(x @ x)

    res = solve(f, np.zeros(2), max_evals=50)
    assert res.status == NONFINITE
    assert math.isfinite(res.fun)


def test_nonfinite_during_initialization():
    res = solve(lambda x: math.inf if x[1] < 0 else 1.0, np.zeros(2), max_evals=50)
    assert res.status == NONFINITE and res.fun == 1.0


def test_unpacking_and_history_csv():
    x, fun, nfev, status = solve(get_function("sphere", 2).fun, [1, 1], max_evals=60)
    res = solve(get_function("sphere", 2).fun, [1, 1], max_evals=60)
    text = history_to_csv(res.history)
    lines = text.splitlines()
    assert lines[0] == "iteration,evaluations,best_value,radius,step"
    assert len(lines) == len(res.history) + 1
    assert np.array_equal(x, res.x) and fun == res.fun


def test_geometry_point_at_center_for_first_polynomial():
    x = geometry_improvement_point(powell_initial_set(2, 5, 1.0), 0, LpBall.centered(2))
    assert np.allclose(x, 0, atol=1e-12)


def test_geometry_point_repairs_degraded_set():
    pts = powell_initial_set(2, 5, 1.0).points.copy()
    pts[3] = pts[1] + 1e-3  # nearly duplicates point 1
    xset = InterpolationSet(pts)
    ball = LpBall.centered(2)
    before = poisedness_constant_numeric(xset, ball).value
    x = geometry_improvement_point(xset, 3, ball)
    repaired = xset.replace(3, x)
    assert is_poised(repaired)[0]
    after = poisedness_constant_numeric(repaired, ball).value
    assert before > 100 and after < before / 100


def test_nonfinite_at_start_point():
    res = solve(lambda x: math.nan, np.zeros(2), max_evals=50)
    assert res.status == NONFINITE and res.nfev == 1 and math.isnan(res.fun)


def test_geometry_point_errors():
    xset = powell_initial_set(2, 5, 1.0)
    with pytest.raises(IndexError):
        geometry_improvement_point(xset, 5, LpBall.centered(2))
    pts = xset.points.copy()
    pts[2] = pts[1]
    with pytest.raises(NotPoisedError):
        geometry_improvement_point(InterpolationSet(pts), 2, LpBall.centered(2))


def _geometry_trials():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        for p in (2.0, math.inf, 1.0):
            for _ in range(40):
                m = int(rng.integers(n + 2, 2 * n + 2))
                ball = LpBall.centered(n, 1.0, p)
                xset = random_poised_set(rng, n, m, ball)
                rep = poisedness_constant_numeric(xset, ball)
                i = rep.argmax
                if i == 0 or rep.value <= 1 + 1e-9:
                    continue
                x = geometry_improvement_point(xset, i, ball)
                yield xset, i, x, ball, rep.value


def test_geometry_point_maximizes_its_polynomial():
    from mfnpoise.lagrange import lagrange_polynomials_numeric
    for xset, i, x, ball, lam in _geometry_trials():
        L = lagrange_polynomials_numeric(xset)[i]
        assert ball.contains(x, 1e-12)
        assert abs(L(x)) >= 1 - 1e-12  # L_i(y_i) = 1 and y_i lies in the ball


@pytest.mark.xfail(strict=True, reason="not a theorem for MFN sets: a few seeded sets get worse after the swap")
def test_geometry_step_never_increases_lambda():
    worse = 0
    for xset, i, x, ball, lam in _geometry_trials():
        after = poisedness_constant_numeric(xset.replace(i, x), ball).value
        worse += after > lam + 1e-9
    assert worse == 0
