import numpy as np
import pytest
from scipy.linalg import null_space

from mfnpoise.core import InterpolationSet, QuadraticModel
from mfnpoise.interpolation import (
    KktSystem,
    NotPoisedError,
    ResidualError,
    UnderdeterminedError,
    assemble_kkt,
    interpolate_many,
    interpolate_mfn,
    interpolate_sym_broyden,
    is_poised,
)
from mfnpoise.lagrange import lagrange_polynomials_numeric
from mfnpoise.powell import powell_initial_set

from conftest import random_sets


def test_powell_kkt_layout():
    kkt = assemble_kkt(powell_initial_set(2, 5, 1.0))
    W = kkt.W
    assert W.shape == (8, 8)
    assert np.array_equal(W, W.T)
    assert np.allclose(np.diag(W)[:5], [0, 0.5, 0.5, 0.5, 0.5])
    assert np.array_equal(W[5:, 5:], np.zeros((3, 3)))
    assert np.array_equal(W[:5, 5], np.ones(5))


def test_one_dimensional_kkt():
    kkt = assemble_kkt(InterpolationSet([[0.0], [1.0], [-1.0]]))
    assert kkt.W.shape == (5, 5)
    assert np.allclose(kkt.W[:3, :3], [[0, 0, 0], [0, 0.5, 0.5], [0, 0.5, 0.5]])
    assert np.allclose(kkt.W[:3, 3:], [[1, 0], [1, 1], [1, -1]])


def test_kkt_brute_force_entries(rng):
    pts = rng.normal(size=(6, 2))
    kkt = assemble_kkt(InterpolationSet(pts, base_index=2))
    s = (pts - pts[2]) / kkt.scale
    for i in range(6):
        for j in range(6):
            assert kkt.W[i, j] == pytest.approx(0.5 * (s[i] @ s[j]) ** 2, abs=1e-15)
    assert np.all(np.diag(kkt.W)[:6] >= 0)


def test_underdetermined():
    with pytest.raises(UnderdeterminedError):
        assemble_kkt(InterpolationSet([[0, 0], [1, 0], [0, 1]]))
    assert is_poised(InterpolationSet([[0, 0]])) == (False, np.inf)


def test_powell_poised():
    ok, cond = is_poised(powell_initial_set(3, 7, 1.0))
    assert ok and np.isfinite(cond)


def test_duplicate_point_not_poised():
    pts = powell_initial_set(2, 5, 1.0).points.copy()
    pts[4] = pts[1]
    assert is_poised(InterpolationSet(pts)) == (False, np.inf)
    with pytest.raises(NotPoisedError):
        interpolate_mfn(InterpolationSet(pts), np.ones(5))


def test_collinear_not_poised():
    t = np.array([0.0, 1.0, -1.0, 2.0])
    pts = np.outer(t, [1.0, 2.0])
    assert is_poised(InterpolationSet(pts)) == (False, np.inf)
    # the X block alone is rank deficient: a brute-force check of every 3x3 minor
    X = np.hstack([np.ones((4, 1)), pts])
    from itertools import combinations
    assert all(abs(np.linalg.det(X[list(r)])) < 1e-12 for r in combinations(range(4), 3))


def test_constant_data():
    for xset in random_sets(0, 3, 5):
        Q = interpolate_mfn(xset, np.ones(xset.m))
        c, g, H = Q.coefficients()
        assert c == pytest.approx(1, abs=1e-10)
        assert np.allclose(g, 0, atol=1e-10) and np.allclose(H, 0, atol=1e-10)


def test_linear_data_on_powell_set():
    s = powell_initial_set(2, 5, 1.0)
    Q = interpolate_mfn(s, s.points[:, 0])
    assert Q.allclose(QuadraticModel(0, [1, 0], np.zeros((2, 2))), atol=1e-14)


def test_square_data_on_powell_set():
    s = powell_initial_set(2, 5, 1.0)
    Q = interpolate_mfn(s, s.points[:, 0] ** 2)
    assert Q.allclose(QuadraticModel(0, [0, 0], np.diag([2.0, 0.0])), atol=1e-14)


def test_broyden_fixed_point(rng):
    for xset in random_sets(1, 2, 5):
        q = QuadraticModel(rng.normal(), rng.normal(size=2), rng.normal(size=(2, 2)), rng.normal(size=2))
        out = interpolate_sym_broyden(xset, q.evaluate(xset.points), q)
        assert out.allclose(q, atol=1e-10)


def test_broyden_from_zero_is_mfn(rng):
    for xset in random_sets(2, 3, 5):
        f = rng.normal(size=xset.m)
        a = interpolate_sym_broyden(xset, f, QuadraticModel.zero(3))
        b = interpolate_mfn(xset, f)
        assert a.allclose(b, atol=1e-12)


def test_broyden_recovers_half_norm_squared():
    s = powell_initial_set(2, 5, 1.0)
    f = 0.5 * np.sum(s.points**2, axis=1)
    qprev = QuadraticModel(0.0, [0, 0], np.eye(2))
    out = interpolate_sym_broyden(s, f, qprev)
    assert out.allclose(qprev, atol=1e-14)


def test_broyden_minimizes_hessian_change(rng):
    # the update never has a larger Hessian change than the plain MFN model relative to qprev
    for xset in random_sets(3, 2, 20):
        f = rng.normal(size=xset.m)
        qprev = QuadraticModel(0, [0, 0], rng.normal(size=(2, 2)))
        new = interpolate_sym_broyden(xset, f, qprev)
        mfn = interpolate_mfn(xset, f)
        assert np.linalg.norm(new.H - qprev.H) <= np.linalg.norm(mfn.H - qprev.H) + 1e-8


def _design(points):
    # coefficients (c, g1, g2, H11, H12, H22) of c + g'x + x'Hx/2
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([np.ones_like(x), x, y, 0.5 * x**2, x * y, 0.5 * y**2])


def test_frobenius_minimality_oracle(rng):
    count = 0
    for xset in random_sets(4, 2, 10, m_range=(4, 5)):
        f = rng.normal(size=xset.m)
        Q = interpolate_mfn(xset, f)
        c, g, H = Q.coefficients()
        best = np.linalg.norm(H)
        N = null_space(_design(xset.points))
        for _ in range(100):
            v = N @ rng.normal(size=N.shape[1]) * rng.uniform(0.01, 10)
            H2 = H + np.array([[v[3], v[4]], [v[4], v[5]]])
            assert best <= np.linalg.norm(H2) + 1e-8
            count += 1
    assert count == 1000


def test_reconstruction_identity(rng):
    for n in (2, 4):
        for xset in random_sets(5 + n, n, 10):
            f = rng.normal(size=xset.m)
            Q = interpolate_mfn(xset, f)
            L = lagrange_polynomials_numeric(xset)
            S = QuadraticModel.zero(n, xset.base)
            for fi, Li in zip(f, L):
                S = S + fi * Li
            scale = 1 + max(np.abs(x).max() for x in Q.coefficients())
            assert Q.allclose(S, atol=1e-8 * scale)


def test_translation_equivariance(rng):
    for xset in random_sets(6, 3, 10):
        f = rng.normal(size=xset.m)
        t = rng.normal(size=3) * 5
        Q = interpolate_mfn(xset, f)
        R = interpolate_mfn(xset.translate(t), f)
        for x in rng.normal(size=(20, 3)):
            assert R(x + t) == pytest.approx(Q(x), abs=1e-8)


def test_base_index_does_not_change_model(rng):
    for xset in random_sets(7, 2, 5):
        f = rng.normal(size=xset.m)
        a = interpolate_mfn(xset, f)
        b = interpolate_mfn(xset.with_base(xset.m - 1), f)
        assert a.allclose(b, atol=1e-9)


def test_interpolate_many_matches_single(rng):
    xset = next(random_sets(8, 3, 1))
    F = rng.normal(size=(xset.m, 4))
    models = interpolate_many(xset, F)
    for j, M in enumerate(models):
        assert M.allclose(interpolate_mfn(xset, F[:, j]), atol=1e-13)


def test_condition_is_scale_free():
    conds = [assemble_kkt(powell_initial_set(4, 9, d)).condition for d in (1e-3, 1.0, 1e3)]
    assert max(conds) / min(conds) < 1 + 1e-9


def test_residual_check_is_enforced(monkeypatch):
    s = powell_initial_set(2, 5, 1.0)
    real = KktSystem.solve

    def corrupted(self, fvals):
        return real(self, fvals) + 1e-6

    monkeypatch.setattr(KktSystem, "solve", corrupted)
    with pytest.raises(ResidualError):
        interpolate_mfn(s, np.arange(5.0))


def test_threshold_is_configurable():
    pts = powell_initial_set(2, 5, 1.0).points.copy()
    pts[4] = pts[1] + 1e-4
    xset = InterpolationSet(pts)
    ok, cond = is_poised(xset)
    assert ok and cond > 1e8
    pts[4] = pts[1] + 1e-7
    assert is_poised(InterpolationSet(pts)) == (False, np.inf)
    assert is_poised(xset, threshold=cond / 2) == (False, np.inf)


def test_bad_data():
    s = powell_initial_set(2, 5, 1.0)
    with pytest.raises(ValueError):
        interpolate_mfn(s, np.ones(4))
    with pytest.raises(ValueError):
        interpolate_mfn(s, [1, 2, np.nan, 4, 5])
