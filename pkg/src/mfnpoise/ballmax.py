"""
Maximization of quadratics over l_p balls.

``max_quadratic_over_ball`` dispatches between several solvers:

``trs``
    p = 2. Exact trust-region subproblem solution from an eigendecomposition
    and a root of the secular equation, with the hard case handled by a step
    along the leftmost eigenvector.
``separable``
    Diagonal Hessian. Coordinates with identical 1-D profiles are grouped;
    inside a group of pure monomials the optimum spreads the radius evenly
    over a support whose size is enumerated, and the radius is then split
    between at most two groups by a grid scan refined by golden section.
    For p = inf every coordinate is independent.
``box``
    p = inf, n <= 12. Enumeration of all faces of the box.
``cross``
    p = 1, n <= 12. Enumeration of all faces of the cross-polytope.
``multistart``
    Anything else: local solves from a deterministic set of starts. The
    result is a lower bound and is reported as not certified.

Ties between maximizers are broken by returning the lexicographically
smallest witness among the evaluated candidates.
"""
from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .core import INF, DimensionError, LpBall, QuadraticModel, inv_order, lp_norm

ENUMERATION_MAX_N = 12
FEASIBILITY_RTOL = 1e-12
_GRID = 4097


class BallMax(NamedTuple):
    x: np.ndarray
    value: float
    certified: bool
    method: str


class AbsBallMax(NamedTuple):
    value: float
    witness: np.ndarray
    certified: bool
    method: str


def _pick(points, values):
    """Best candidate: largest value, then lexicographically smallest point."""
    points = np.atleast_2d(points)
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values)
    points, values = points[ok], values[ok]
    vmax = values.max()
    tie = values >= vmax - 1e-12 * (1.0 + abs(vmax))
    cand = points[tie]
    order = np.lexsort(cand.T[::-1])
    return cand[order[0]]


def _into_ball(d, radius, p):
    """Scale a step back onto the ball if rounding pushed it outside."""
    nrm = lp_norm(d, p)
    if nrm > radius:
        d = d * (radius / nrm)
    return d


def _local_coefficients(Q, ball):
    local = Q.rebase(ball.center)
    return local.c, np.array(local.g), np.array(local.H)


# ---------------------------------------------------------------- p = 2

def _trs_candidates(g, H, radius):
    """
    Global maximizers of ``g'd + d'Hd/2`` over ``||d||_2 <= radius``.

    Equivalent to minimizing ``G'd + d'Bd/2`` with ``G = -g``, ``B = -H``;
    the solution satisfies ``(B + lam I) d = -G`` with ``B + lam I`` positive
    semidefinite and ``lam (||d|| - radius) = 0``.
    """
    n = g.size
    w, V = np.linalg.eigh(-H)
    a = V.T @ (-g)
    scale = max(1.0, np.max(np.abs(w)))
    w0 = w[0]
    cands = []

    if w0 > 1e-14 * scale:
        d0 = -V @ (a / w)
        if np.linalg.norm(d0) <= radius:
            return [d0]

    lam_low = max(0.0, -w0)
    low_block = w <= w0 + 1e-12 * scale
    anorm = np.linalg.norm(a)

    def inv_norm(lam):
        den = w + lam
        if np.any((den <= 0) & (a != 0)):
            return 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sqrt(np.sum(np.where(a != 0, a**2 / den**2, 0.0)))
        return 0.0 if not np.isfinite(val) else (np.inf if val == 0 else 1.0 / val)

    def secular(lam):
        return inv_norm(lam) - 1.0 / radius

    lam_high = lam_low + anorm / radius + 1e-300
    if anorm > 0 and secular(lam_low) < 0 <= secular(lam_high):
        lam = brentq(secular, lam_low, lam_high, xtol=1e-15 * max(1.0, lam_high), rtol=1e-15, maxiter=500)
        den = np.where(w + lam > 0, w + lam, np.inf)
        cands.append(-V @ (a / den))

    # Hard case: gradient (numerically) orthogonal to the leftmost eigenspace.
    if np.linalg.norm(a[low_block]) <= 1e-10 * max(anorm, 1.0):
        den = np.where(low_block, np.inf, w + lam_low)
        d_low = -V @ (a / den)
        rest = radius**2 - d_low @ d_low
        if rest >= 0:
            v = V[:, 0]
            tau = np.sqrt(rest)
            cands.extend([d_low + tau * v, d_low - tau * v])
            if lam_low == 0.0:
                cands.append(d_low)

    if not cands:
        # Degenerate numerics; the boundary solution along -g is still feasible.
        cands.append(np.zeros(n) if anorm == 0 else g / np.linalg.norm(g) * radius)
    return [_into_ball(d, radius, 2.0) for d in cands]


def _solve_trs(c, g, H, radius):
    cands = np.array(_trs_candidates(g, H, radius))
    vals = c + cands @ g + 0.5 * np.einsum("ki,ij,kj->k", cands, H, cands)
    return _pick(cands, vals)


# ---------------------------------------------------------- separable

class _Group(NamedTuple):
    coords: tuple
    kind: str      # "mono" or "mixed"
    a: float       # monomial coefficient (mono) or gradient (mixed)
    q: float       # monomial degree (mono) or half curvature (mixed)
    signs: tuple   # sign of each coordinate in the witness


def monomial_support_max(k, q, p):
    """
    Best support size ``j`` and factor ``j * j**(-q/p)`` for maximizing
    ``sum |t_i|**q`` over ``||t||_p <= 1`` with ``k`` coordinates.

    Any KKT point with ``q != p`` has equal nonzero magnitudes, so the
    optimum spreads the radius evenly over some ``j`` coordinates.
    """
    j = np.arange(1, k + 1, dtype=float)
    if q == INF:
        # max |t_i| on an even spread of j coordinates: j**(-1/p)
        vals = j ** (-inv_order(p))
    else:
        vals = j ** (1.0 - q * inv_order(p))
    best = int(np.argmax(vals))  # first index wins ties
    return best + 1, float(vals[best])


def _group_value(group, r, p):
    """Best value of a group given radius ``r`` and its witness entries."""
    k = len(group.coords)
    if group.kind == "mono":
        j, factor = monomial_support_max(k, group.q, p)
        t = r * j ** (-inv_order(p))
        w = np.zeros(k)
        w[:j] = t * np.asarray(group.signs[:j])
        return group.a * factor * r**group.q, w
    gl, hh = group.a, group.q
    ts = [-r, r]
    if hh != 0.0:
        ts.append(float(np.clip(-gl / (2.0 * hh), -r, r)))
    ts = np.array(sorted(ts))
    vals = gl * ts + hh * ts**2
    i = int(np.argmax(vals))
    return float(vals[i]), np.array([ts[i]])


def _make_groups(g, H, radius):
    n = g.size
    scale = max(np.max(np.abs(g)) * radius, np.max(np.abs(H)) * radius**2, 1e-300)
    off = H - np.diag(np.diag(H))
    if np.max(np.abs(off)) * radius**2 > 1e-10 * scale:
        return None
    h = np.diag(H)
    tol = 1e-9 * scale
    groups = []
    for j in range(n):
        gj, hj = g[j], h[j]
        lin = abs(gj) * radius > tol
        quad = abs(hj) * radius**2 > tol
        if not lin and not quad:
            continue
        if quad and not lin:
            if hj < 0:
                continue  # concave pure square: best left at zero
            key = ("mono", 0.5 * hj, 2.0)
        elif lin and not quad:
            key = ("mono", abs(gj), 1.0)
        else:
            key = ("mixed", gj, 0.5 * hj)
        sign = 1.0 if key[0] == "mono" and key[2] == 1.0 and gj > 0 else -1.0
        for idx, (gkey, coords, signs) in enumerate(groups):
            if gkey[0] == key[0] == "mono" and gkey[2] == key[2] and abs(gkey[1] - key[1]) * radius**key[2] <= tol:
                groups[idx] = (gkey, coords + (j,), signs + (sign,))
                break
        else:
            groups.append((key, (j,), (sign,)))
    out = []
    for key, coords, signs in groups:
        if key[0] == "mono":
            out.append(_Group(coords, "mono", key[1], key[2], signs))
        else:
            out.append(_Group(coords, "mixed", key[1], key[2], signs))
    return out


def _group_curve(group, rs, p):
    """Vectorized best value of a group over an array of radii."""
    if group.kind == "mono":
        _, factor = monomial_support_max(len(group.coords), group.q, p)
        return group.a * factor * rs**group.q
    gl, hh = group.a, group.q
    best = np.maximum(gl * rs + hh * rs**2, -gl * rs + hh * rs**2)
    if hh < 0:
        t = np.clip(-gl / (2.0 * hh), -rs, rs)
        best = np.maximum(best, gl * t + hh * t**2)
    return best


def _solve_separable(c, g, H, radius, p):
    """Returns the step, or None when the model is not separable enough."""
    n = g.size
    groups = _make_groups(g, H, radius)
    if groups is None:
        return None
    if p == INF:
        # box: coordinates are independent
        d = np.zeros(n)
        for j in range(n):
            ts = np.array([-radius, 0.0, radius])
            hj, gj = H[j, j], g[j]
            if hj < 0:
                ts = np.append(ts, np.clip(-gj / hj, -radius, radius))
            ts = np.sort(ts)
            vals = gj * ts + 0.5 * hj * ts**2
            d[j] = ts[int(np.argmax(vals))]
        return d
    if any(gr.kind == "mixed" and len(gr.coords) > 1 for gr in groups) or len(groups) > 2:
        return None
    if not groups:
        return np.zeros(n)

    def assemble(radii):
        d = np.zeros(n)
        for gr, r in zip(groups, radii):
            d[list(gr.coords)] = _group_value(gr, r, p)[1]
        return d

    if len(groups) == 1:
        return assemble([radius])

    def split(u):
        # (u, 1 - u) normalized onto the unit l_p sphere: both radii are smooth in u
        u = np.clip(u, 0.0, 1.0)
        nrm = (u**p + (1.0 - u) ** p) ** (1.0 / p)
        return radius * u / nrm, radius * (1.0 - u) / nrm

    def F(u):
        r1, r2 = split(u)
        return _group_curve(groups[0], r1, p) + _group_curve(groups[1], r2, p)

    def negF(u):
        return -float(F(u))

    us = np.linspace(0.0, 1.0, _GRID)
    vals = F(us)
    best_t = [us[0], us[-1]]
    peaks = np.flatnonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]) & ((vals[1:-1] > vals[:-2]) | (vals[1:-1] > vals[2:]))) + 1
    for i in peaks:
        bracket = (us[i - 1], us[i], us[i + 1])
        try:
            res = minimize_scalar(negF, bracket=bracket, method="golden", options={"xtol": 1e-10})
            t = float(np.clip(res.x, 0.0, 1.0))
            best_t.append(t if F(t) >= vals[i] else us[i])
        except ValueError:
            best_t.append(us[i])
    # a maximum can also hide inside the first or last grid cell
    for lo, hi in ((us[0], us[1]), (us[-2], us[-1])):
        res = minimize_scalar(negF, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best_t.append(float(res.x))
    cands = np.array([_into_ball(assemble(split(t)), radius, p) for t in best_t])
    cvals = c + cands @ g + 0.5 * np.einsum("ki,ij,kj->k", cands, H, cands)
    return _pick(cands, cvals)


# ------------------------------------------------- polytope enumeration

def _sign_patterns(k):
    if k == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product((-1.0, 1.0), repeat=k)))


def _solve_box(c, g, H, radius):
    n = g.size
    scale = max(1.0, np.max(np.abs(H)))
    pts, vals = [], []
    for free_mask in range(1 << n):
        F = [j for j in range(n) if free_mask >> j & 1]
        X = [j for j in range(n) if not free_mask >> j & 1]
        P = radius * _sign_patterns(len(X))
        D = np.zeros((P.shape[0], n))
        D[:, X] = P
        if F:
            HFF = H[np.ix_(F, F)]
            if np.linalg.eigvalsh(HFF)[-1] > 1e-12 * scale:
                continue
            rhs = -(g[F][:, None] + H[np.ix_(F, X)] @ P.T)
            xF = np.linalg.lstsq(HFF, rhs, rcond=None)[0]
            resid = np.max(np.abs(HFF @ xF - rhs), axis=0) if xF.size else np.zeros(P.shape[0])
            ok = (resid <= 1e-9 * (1.0 + np.max(np.abs(rhs), axis=0))) & np.all(np.abs(xF) <= radius * (1 + FEASIBILITY_RTOL), axis=0)
            if not np.any(ok):
                continue
            D[:, F] = np.clip(xF.T, -radius, radius)
            D = D[ok]
        pts.append(D)
        vals.append(c + D @ g + 0.5 * np.einsum("ki,ij,kj->k", D, H, D))
    pts = np.vstack(pts)
    return _pick(pts, np.concatenate(vals))


def _solve_cross(c, g, H, radius):
    n = g.size
    pts, vals = [], []
    # interior stationary point
    try:
        d = np.linalg.solve(H, -g)
        if np.sum(np.abs(d)) <= radius * (1 + FEASIBILITY_RTOL):
            pts.append(d[None, :])
    except np.linalg.LinAlgError:
        pass
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            S = list(S)
            sig = _sign_patterns(size)
            K = np.zeros((sig.shape[0], size + 1, size + 1))
            K[:, :size, :size] = H[np.ix_(S, S)]
            K[:, :size, size] = sig
            K[:, size, :size] = sig
            rhs = np.zeros((sig.shape[0], size + 1))
            rhs[:, :size] = -g[S]
            rhs[:, size] = radius
            sol, good = _batched_solve(K, rhs)
            dS = sol[:, :size]
            ok = good & np.all(sig * dS >= -1e-12 * radius, axis=1)
            if not np.any(ok):
                continue
            D = np.zeros((int(ok.sum()), n))
            D[:, S] = dS[ok]
            pts.append(D)
    pts = np.vstack(pts)
    pts = np.array([_into_ball(d, radius, 1.0) for d in pts])
    vals = c + pts @ g + 0.5 * np.einsum("ki,ij,kj->k", pts, H, pts)
    return _pick(pts, vals)


def _batched_solve(K, rhs):
    try:
        sol = np.linalg.solve(K, rhs[..., None])[..., 0]
        good = np.all(np.isfinite(sol), axis=1)
    except np.linalg.LinAlgError:
        sol = np.zeros_like(rhs)
        good = np.zeros(rhs.shape[0], dtype=bool)
        for i in range(rhs.shape[0]):
            try:
                sol[i] = np.linalg.solve(K[i], rhs[i])
                good[i] = np.all(np.isfinite(sol[i]))
            except np.linalg.LinAlgError:
                pass
    if np.any(good):
        resid = np.max(np.abs(np.einsum("kij,kj->ki", K, sol) - rhs), axis=1)
        good &= resid <= 1e-9 * (1.0 + np.max(np.abs(rhs), axis=1))
    return sol, good


# ----------------------------------------------------------- heuristic

def _starts(n, radius, p, budget, rng):
    inv = inv_order(p)
    starts = [np.zeros(n)]
    axes = [s * radius * e for e in np.eye(n) for s in (1.0, -1.0)]
    n_axes = min(len(axes), max(0, (budget - 1) // 2))
    starts.extend(axes[:n_axes])
    n_vert = max(0, (budget - len(starts)) // 2)
    for _ in range(n_vert):
        starts.append(radius * n**-inv * rng.choice((-1.0, 1.0), size=n))
    while len(starts) < budget:
        u = rng.standard_normal(n)
        u *= radius / lp_norm(u, p) * rng.uniform() ** (1.0 / n)
        starts.append(u)
    return np.array(starts[:max(budget, 1)])


def _solve_multistart(c, g, H, radius, p, budget, seed):
    n = g.size
    rng = np.random.default_rng(seed)
    starts = _starts(n, radius, p, budget, rng)

    def neg(d):
        return -(g @ d + 0.5 * d @ H @ d)

    def neg_grad(d):
        return -(g + H @ d)

    results = [s for s in starts]
    for s in starts:
        if p == INF:
            res = minimize(neg, s, jac=neg_grad, method="L-BFGS-B", bounds=[(-radius, radius)] * n)
        else:
            cons = {
                "type": "ineq",
                "fun": lambda d: 1.0 - np.sum(np.abs(d / radius) ** p),
                "jac": lambda d: -p * np.abs(d / radius) ** (p - 1) * np.sign(d) / radius,
            }
            res = minimize(neg, s, jac=neg_grad, method="SLSQP", constraints=[cons], options={"maxiter": 200, "ftol": 1e-14})
        if np.all(np.isfinite(res.x)):
            results.append(res.x)
    pts = np.array([_into_ball(d, radius, p) for d in results])
    vals = c + pts @ g + 0.5 * np.einsum("ki,ij,kj->k", pts, H, pts)
    return _pick(pts, vals)


# ------------------------------------------------------------- public

_CERTIFIED = {"trs", "separable", "box", "cross"}


def max_quadratic_over_ball(Q: QuadraticModel, ball: LpBall, budget=32, method="auto", seed=0) -> BallMax:
    """
    Maximize ``Q`` over ``ball``.

    Parameters
    ----------
    Q : QuadraticModel
    ball : LpBall
    budget : int
        Number of starts of the multistart heuristic.
    method : {"auto", "trs", "separable", "box", "cross", "multistart"}
        Force a particular solver. ``auto`` picks the first exact solver
        that applies: trs (p = 2), separable (diagonal Hessian), box
        (p = inf, n <= 12), cross (p = 1, n <= 12); otherwise multistart.
    seed : int
        Seed of the multistart starting points.

    Returns
    -------
    BallMax
        ``(x, value, certified, method)`` with ``value == Q(x)``.
    """
    if Q.n != ball.n:
        raise DimensionError(f"model has n={Q.n}, ball has n={ball.n}")
    c, g, H = _local_coefficients(Q, ball)
    n, radius, p = Q.n, ball.radius, ball.p

    d = None
    used = method
    if method == "auto":
        if p == 2.0:
            used, d = "trs", _solve_trs(c, g, H, radius)
        else:
            d = _solve_separable(c, g, H, radius, p)
            used = "separable"
            if d is None and n <= ENUMERATION_MAX_N and p in (1.0, INF):
                used = "box" if p == INF else "cross"
                d = _solve_box(c, g, H, radius) if p == INF else _solve_cross(c, g, H, radius)
            if d is None:
                used, d = "multistart", _solve_multistart(c, g, H, radius, p, budget, seed)
    elif method == "trs":
        if p != 2.0:
            raise ValueError("the trs solver requires p = 2")
        d = _solve_trs(c, g, H, radius)
    elif method == "separable":
        d = _solve_separable(c, g, H, radius, p)
        if d is None:
            raise ValueError("model is not separable into at most two coordinate groups")
    elif method == "box":
        if p != INF:
            raise ValueError("the box solver requires p = inf")
        d = _solve_box(c, g, H, radius)
    elif method == "cross":
        if p != 1.0:
            raise ValueError("the cross solver requires p = 1")
        d = _solve_cross(c, g, H, radius)
    elif method == "multistart":
        d = _solve_multistart(c, g, H, radius, p, budget, seed)
    else:
        raise ValueError(f"unknown method {method!r}")

    d = _into_ball(np.asarray(d, dtype=float), radius, p)
    x = ball.center + d
    return BallMax(x, Q.evaluate(x), used in _CERTIFIED, used)


def max_abs_quadratic_over_ball(Q: QuadraticModel, ball: LpBall, budget=32, method="auto", seed=0) -> AbsBallMax:
    """``max |Q|`` over ``ball`` from one maximization of ``Q`` and one of ``-Q``."""
    up = max_quadratic_over_ball(Q, ball, budget, method, seed)
    down = max_quadratic_over_ball(-Q, ball, budget, method, seed)
    certified = up.certified and down.certified
    used = up.method if up.method == down.method else f"{up.method}+{down.method}"
    if abs(up.value - down.value) <= 1e-12 * (1.0 + abs(up.value)):
        w = _pick(np.array([up.x, down.x]), [0.0, 0.0])
        return AbsBallMax(max(up.value, down.value), w, certified, used)
    best = up if up.value > down.value else down
    return AbsBallMax(best.value, best.x, certified, used)


def max_lq_norm_over_lp_ball(n, p, q) -> float:
    """Closed form of ``max ||x||_q`` over the unit l_p ball in ``R^n``."""
    return max(1.0, float(n) ** (inv_order(q) - inv_order(p)))


def max_lq_norm_numeric(n, p, q):
    """
    ``max ||x||_q`` over the unit l_p ball by support-size enumeration.

    Returns ``(value, witness)``. Independent of the closed form: the
    candidate maximizers are the evenly spread vectors on supports of size
    ``j = 1..n``, and the best one is found by evaluating all of them.
    """
    best_val, best_x = -np.inf, None
    inv = inv_order(p)
    for j in range(1, n + 1):
        x = np.zeros(n)
        x[:j] = j**-inv
        val = lp_norm(x, q)
        if val > best_val * (1 + 1e-15):
            best_val, best_x = val, x
    return best_val, best_x
