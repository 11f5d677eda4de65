"""
Well-poisedness constants of interpolation sets.

The constant of a poised set in a compact set ``C`` is the largest absolute
value of any of its MFN Lagrange polynomials over ``C``. For Powell's
initial set in the ball ``||x - x0||_p <= delta`` it is written
``lambda_p(n, m)`` below and only depends on ``n``, ``m`` and ``p``.

Known values of ``lambda_p`` (``k = 2n + 1 - m``):

* ``1 <= p <= 2``: ``1 + k**((p-1)/p)``
* ``m = 2n + 1``: ``max(1, n**((p-2)/p) - 1)``
* ``p = inf``: ``max(n - 1, 2n - m + 2)``

and for every ``p``: ``1 + k**((p-1)/p) <= lambda_p <= n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ballmax import max_abs_quadratic_over_ball
from .core import INF, InterpolationSet, LpBall, check_order, ext_pow, order_ratio
from .interpolation import CONDITION_THRESHOLD, NotPoisedError, ResidualError, assemble_kkt
from .lagrange import lagrange_polynomials_numeric, powell_lagrange_all
from .powell import powell_initial_set

CLOSED_FORM = "closed-form"
CERTIFIED = "certified-numeric"
HEURISTIC = "heuristic-numeric"


@dataclass(frozen=True, eq=False)
class PoisednessReport:
    """
    Per-index maxima of ``|L_i|`` over a ball and their maximum.

    ``argmax`` is 0-based and resolves near-ties (relative ``1e-12``) to the
    lowest index; ``witnesses[i]`` attains ``per_index[i]``.
    """

    per_index: np.ndarray
    witnesses: np.ndarray
    method: str
    ball: LpBall
    condition: float = math.nan

    @property
    def value(self) -> float:
        return float(np.max(self.per_index))

    @property
    def argmax(self) -> int:
        v = self.per_index
        return int(np.flatnonzero(v >= v.max() - 1e-12 * max(1.0, v.max()))[0])

    @property
    def witness(self) -> np.ndarray:
        return self.witnesses[self.argmax]


def _check_nm(n, m):
    n, m = int(n), int(m)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not n + 2 <= m <= 2 * n + 1:
        raise ValueError(f"m must lie in [n+2, 2n+1] = [{n + 2}, {2 * n + 1}], got {m}")
    return n, m


def _report(polys, ball, budget, seed, closed=False, condition=math.nan):
    maxima, witnesses, certified = [], [], True
    for L in polys:
        res = max_abs_quadratic_over_ball(L, ball, budget=budget, seed=seed)
        maxima.append(res.value)
        witnesses.append(res.witness)
        certified &= res.certified
    method = CLOSED_FORM if closed else (CERTIFIED if certified else HEURISTIC)
    return PoisednessReport(np.array(maxima), np.array(witnesses), method, ball, condition)


def poisedness_constant_numeric(xset: InterpolationSet, ball: LpBall, budget=32, seed=0, threshold=CONDITION_THRESHOLD) -> PoisednessReport:
    """
    Constant of well-poisedness of ``xset`` in ``ball``.

    The Lagrange polynomials are computed from the KKT system and each
    ``|L_i|`` is maximized over the ball. The report's method is
    ``certified-numeric`` only if every maximization was exact.

    Raises
    ------
    NotPoisedError
        If ``xset`` is not poised.
    """
    if ball.n != xset.n:
        raise ValueError(f"ball has n={ball.n}, set has n={xset.n}")
    kkt = assemble_kkt(xset, threshold)
    if not kkt.poised:
        raise NotPoisedError(f"interpolation set is not poised (condition estimate {kkt.condition:.3e})")
    polys = lagrange_polynomials_numeric(xset, kkt)
    return _report(polys, ball, budget, seed, condition=kkt.condition)


def powell_poisedness(n, m, p, delta=1.0, x0=None, lagrange="numeric") -> PoisednessReport:
    """
    ``lambda_p`` of Powell's set in the l_p ball of radius ``delta`` around ``x0``.

    ``lagrange="closed"`` uses the closed-form Lagrange polynomials instead
    of solving the KKT system; the maximization is the same.
    """
    n, m = _check_nm(n, m)
    xset = powell_initial_set(n, m, delta, x0)
    ball = LpBall(xset.points[0], delta, p)
    if lagrange == "numeric":
        return poisedness_constant_numeric(xset, ball)
    if lagrange == "closed":
        return _report(powell_lagrange_all(n, m, delta, x0), ball, 32, 0, closed=True)
    raise ValueError(f"lagrange must be 'numeric' or 'closed', got {lagrange!r}")


class ClosedLambda(NamedTuple):
    value: float | None
    source: str


def lambda_p_closed(n, m, p) -> ClosedLambda:
    """
    Known closed form of ``lambda_p`` for Powell's set, if any.

    ``source`` names the applicable formulas (``"p<=2"``, ``"m=2n+1"``,
    ``"p=inf"``), comma-separated when several apply; they are checked to
    agree. ``value`` is None (and ``source`` empty) for ``2 < p < inf``
    with ``m < 2n + 1``.
    """
    n, m = _check_nm(n, m)
    p = check_order(p)
    k = 2 * n + 1 - m
    found = []
    if p <= 2.0:
        found.append(("p<=2", 1.0 + ext_pow(k, order_ratio(p, 1))))
    if k == 0:
        found.append(("m=2n+1", max(1.0, ext_pow(n, order_ratio(p, 2)) - 1.0)))
    if p == INF:
        found.append(("p=inf", float(max(n - 1, 2 * n - m + 2))))
    if not found:
        return ClosedLambda(None, "")
    values = [v for _, v in found]
    if max(values) - min(values) > 1e-12 * max(values):
        raise ArithmeticError(f"inconsistent closed forms for n={n}, m={m}, p={p}: {found}")
    return ClosedLambda(values[0], ",".join(name for name, _ in found))


def lambda_p_bounds(n, m, p):
    """``(1 + (2n+1-m)**((p-1)/p), n)``, valid for every ``p``."""
    n, m = _check_nm(n, m)
    p = check_order(p)
    lower = 1.0 + ext_pow(2 * n + 1 - m, order_ratio(p, 1))
    upper = float(n)
    if lower > upper * (1 + 1e-15):
        raise ArithmeticError(f"lower bound {lower} exceeds upper bound {upper}")
    return lower, upper


def optimality_threshold(n) -> float:
    """Largest ``p`` for which Powell's full set is known to be optimal."""
    if n <= 2:
        return INF
    return 2.0 * math.log(n) / math.log(n / 2.0)


def optimality_applies(n, p) -> bool:
    p = check_order(p)
    return n <= 2 or p <= optimality_threshold(n) * (1 + 1e-12)


class OptimalityGap(NamedTuple):
    value: float
    reference: float
    satisfies: bool
    guaranteed: bool
    report: PoisednessReport


def optimality_gap(xset: InterpolationSet, ball: LpBall, budget=32, seed=0) -> OptimalityGap:
    """
    Compare a set containing the ball center with Powell's full set.

    ``reference`` is ``lambda_p`` of Powell's set with ``m = 2n + 1`` in the
    same ball; ``satisfies`` says whether ``xset`` does no better than it
    (up to ``1e-8``). ``guaranteed`` is true when ``n <= 2`` or
    ``p <= 2 log(n) / log(n/2)``, where ``satisfies`` must hold.
    """
    dist = np.max(np.abs(xset.points - ball.center), axis=1)
    if not np.any(dist <= 1e-12 * ball.radius):
        raise ValueError("no interpolation point coincides with the ball center")
    report = poisedness_constant_numeric(xset, ball, budget, seed)
    n = xset.n
    reference = max(1.0, ext_pow(n, order_ratio(ball.p, 2)) - 1.0)
    return OptimalityGap(report.value, reference, report.value >= reference - 1e-8, optimality_applies(n, ball.p), report)


def random_in_ball(rng, n, p, size):
    """Uniform samples from the unit l_p ball (generalized Gaussian method)."""
    if p == INF:
        return rng.uniform(-1.0, 1.0, size=(size, n))
    y = rng.gamma(1.0 / p, 1.0, size=(size, n)) ** (1.0 / p) * rng.choice((-1.0, 1.0), size=(size, n))
    z = rng.exponential(1.0, size=(size, 1))
    return y / (np.sum(np.abs(y) ** p, axis=1, keepdims=True) + z) ** (1.0 / p)


def random_poised_set(rng, n, m, ball: LpBall, max_tries=1000) -> InterpolationSet:
    """
    ``m`` points uniform in ``ball`` with the first one at its center.

    Draws that are not poised (condition estimate above the threshold), or
    whose Lagrange polynomials fail the interpolation residual check, are
    rejected.
    """
    for _ in range(max_tries):
        pts = ball.center + ball.radius * random_in_ball(rng, n, ball.p, m)
        pts[0] = ball.center
        xset = InterpolationSet(pts)
        kkt = assemble_kkt(xset)
        if not kkt.poised:
            continue
        try:
            lagrange_polynomials_numeric(xset, kkt)
        except ResidualError:
            continue
        return xset
    raise RuntimeError(f"no poised set found in {max_tries} draws")


@dataclass(frozen=True)
class LambdaRow:
    n: int
    m: int
    p: float
    delta: float
    closed: float | None
    numeric: float | None
    method: str
    witness: tuple = ()

    @property
    def abs_diff(self):
        if self.closed is None or self.numeric is None:
            return None
        return abs(self.closed - self.numeric)


def lambda_row(n, m, p, delta=1.0, mode="both") -> LambdaRow:
    if mode not in ("closed", "numeric", "both"):
        raise ValueError(f"mode must be closed, numeric or both, got {mode!r}")
    p = check_order(p)
    closed = lambda_p_closed(n, m, p).value if mode in ("closed", "both") else None
    numeric, method, witness = None, CLOSED_FORM, ()
    if mode in ("numeric", "both"):
        rep = powell_poisedness(n, m, p, delta)
        numeric, method, witness = rep.value, rep.method, tuple(rep.witness.tolist())
    return LambdaRow(n, m, p, float(delta), closed, numeric, method, witness)


def sweep_lambda_vs_m(n, p, delta=1.0, mode="both"):
    """One :class:`LambdaRow` per ``m`` in ``[n+2, 2n+1]``."""
    return [lambda_row(n, m, p, delta, mode) for m in range(n + 2, 2 * n + 2)]


# -------------------------------------------------------------- verify

P_GRID = (1.0, 1.5, 2.0, 2.5, 3.0, 4.0, INF)


@dataclass(frozen=True)
class Check:
    n: int
    m: int
    p: float | None
    delta: float
    name: str
    expected: float | None
    observed: float
    error: float
    method: str
    passed: bool


def _powell_checks(n, m, delta, tol, p_grid):
    xset = powell_initial_set(n, m, delta)
    kkt = assemble_kkt(xset)
    numeric = lagrange_polynomials_numeric(xset, kkt)
    closed = powell_lagrange_all(n, m, delta)
    coef_err = max(
        max(abs(a.c - b.c), np.max(np.abs(a.g - b.g)), np.max(np.abs(a.H - b.H)))
        for a, b in zip((q.rebase(np.zeros(n)) for q in numeric), closed)
    )
    yield Check(n, m, None, delta, "lagrange", 0.0, float(coef_err), float(coef_err), "kkt", coef_err <= 1e-8)

    for p in p_grid:
        ball = LpBall(np.zeros(n), delta, p)
        rep = _report(numeric, ball, 32, 0, condition=kkt.condition)
        val = rep.value
        lo, hi = lambda_p_bounds(n, m, p)
        slack = min(val - lo, hi - val)
        yield Check(n, m, p, delta, "bounds", None, val, slack, rep.method, slack >= -1e-8)
        others = np.delete(rep.per_index, 0)
        red_err = float(np.max(np.abs(others - 1.0))) if others.size else 0.0
        yield Check(n, m, p, delta, "reduction", 1.0, val, red_err, rep.method, rep.per_index[0] >= val - 1e-8 and red_err <= 1e-8)
        cl = lambda_p_closed(n, m, p)
        if cl.value is not None:
            err = abs(val - cl.value)
            yield Check(n, m, p, delta, f"closed[{cl.source}]", cl.value, val, err, rep.method, err <= tol * max(1.0, abs(cl.value)))


def verify_grid(n_max=8, tol=1e-6, delta=1.0, n_min=2, p_grid=P_GRID):
    """
    Numerical verification of the closed forms and bounds for Powell's set.

    Runs, for every ``n`` in ``[n_min, n_max]`` and ``m`` in ``[n+2, 2n+1]``:
    the closed-form Lagrange polynomial check; and for every ``p`` in
    ``p_grid`` the bounds sandwich, the reduction to ``L_0`` and the
    comparison with every applicable closed form.

    Returns
    -------
    list of Check
        In deterministic (n, m, p, check) order.
    """
    checks = []
    for n in range(n_min, n_max + 1):
        for m in range(n + 2, 2 * n + 2):
            checks.extend(_powell_checks(n, m, delta, tol, p_grid))
    return checks
