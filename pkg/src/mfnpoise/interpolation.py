"""
Minimum Frobenius norm (MFN) quadratic interpolation.

Among all quadratics matching the data on the interpolation set, the MFN
interpolant has the Hessian of least Frobenius norm. Writing
``s_i = (y_i - b)/sigma`` for the shifted and scaled points, it solves the
symmetric saddle-point system::

    [ A   X ] [lam]   [f]
    [ X'  0 ] [ v ] = [0]

with ``A_ij = 0.5 (s_i's_j)**2`` and row ``i`` of ``X`` equal to ``(1, s_i')``.
The model is recovered as ``c = v_0``, ``g = v_1: / sigma`` and
``H = sum_i lam_i s_i s_i' / sigma**2``.

``sigma`` is the largest distance from the base point to the other points
(1 when all points coincide). It keeps the condition number of the system
independent of the size of the set; poisedness itself is scale invariant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .core import DimensionError, InterpolationSet, QuadraticModel

#: Sets whose KKT condition estimate exceeds this are treated as not poised.
CONDITION_THRESHOLD = 1e12
#: Relative tolerance of the post-solve interpolation check.
RESIDUAL_TOL = 1e-10


class NotPoisedError(ValueError):
    """The interpolation set is not poised (singular or ill-conditioned KKT system)."""


class UnderdeterminedError(NotPoisedError):
    """Fewer than n + 2 points: no second-order information can be fitted."""


class ResidualError(ArithmeticError):
    """The computed model violates the interpolation conditions beyond tolerance."""


@dataclass(frozen=True, eq=False)
class KktSystem:
    """Assembled and factorized KKT system of one interpolation set."""

    W: np.ndarray
    base: np.ndarray
    scale: float
    shifted: np.ndarray  # scaled points s_i, shape (m, n)
    ldu: np.ndarray
    ipiv: np.ndarray
    factor_info: int
    condition: float
    threshold: float = CONDITION_THRESHOLD

    @property
    def m(self) -> int:
        return self.shifted.shape[0]

    @property
    def n(self) -> int:
        return self.shifted.shape[1]

    @property
    def poised(self) -> bool:
        return self.factor_info == 0 and self.condition <= self.threshold

    def solve(self, fvals) -> np.ndarray:
        """
        Solve for one right-hand side (shape ``(m,)``) or several (``(m, k)``).

        Returns the stacked unknowns ``(lam, c, g_scaled)`` per column.
        """
        if not self.poised:
            raise NotPoisedError(f"KKT system is singular or ill-conditioned (condition estimate {self.condition:.3e})")
        fvals = np.asarray(fvals, dtype=float)
        single = fvals.ndim == 1
        F = fvals.reshape(self.m, -1)
        rhs = np.zeros((self.m + self.n + 1, F.shape[1]))
        rhs[: self.m] = F
        sol, info = lapack.dsytrs(self.ldu, self.ipiv, rhs)
        if info != 0:
            raise NotPoisedError(f"symmetric indefinite solve failed (info={info})")
        return sol[:, 0] if single else sol

    def model_from_solution(self, sol) -> QuadraticModel:
        m, s = self.m, self.shifted
        lam, c, g = sol[:m], sol[m], sol[m + 1:]
        H = (s.T * lam) @ s
        return QuadraticModel(c, g / self.scale, H / self.scale**2, self.base)


def _kkt_matrix(s):
    m, n = s.shape
    gram = s @ s.T
    A = 0.5 * gram**2
    X = np.hstack([np.ones((m, 1)), s])
    W = np.zeros((m + n + 1, m + n + 1))
    W[:m, :m] = A
    W[:m, m:] = X
    W[m:, :m] = X.T
    return W


def assemble_kkt(xset: InterpolationSet, threshold=CONDITION_THRESHOLD) -> KktSystem:
    """
    Assemble and factorize the KKT system of ``xset``.

    Uses the LAPACK Bunch-Kaufman factorization (``dsytrf``) and its
    1-norm reciprocal condition estimate (``dsycon``).

    Raises
    ------
    UnderdeterminedError
        If ``xset`` has fewer than ``n + 2`` points.
    """
    m, n = xset.m, xset.n
    if m < n + 2:
        raise UnderdeterminedError(f"need at least n+2 = {n + 2} points for quadratic interpolation, got {m}")
    base = np.array(xset.base)
    d = xset.points - base
    scale = float(np.max(np.linalg.norm(d, axis=1)))
    if scale == 0.0:
        scale = 1.0
    s = d / scale
    W = _kkt_matrix(s)
    ldu, ipiv, info = lapack.dsytrf(W)
    if info == 0:
        anorm = float(np.max(np.sum(np.abs(W), axis=0)))
        rcond, _ = lapack.dsycon(ldu, ipiv, anorm)
        condition = np.inf if rcond == 0.0 else 1.0 / rcond
    else:
        condition = np.inf
    W.flags.writeable = False
    return KktSystem(W, base, scale, s, ldu, ipiv, int(info), float(condition), float(threshold))


def is_poised(xset: InterpolationSet, threshold=CONDITION_THRESHOLD):
    """
    Return ``(poised, condition)``.

    Degenerate sets give ``(False, inf)`` rather than raising.
    """
    try:
        kkt = assemble_kkt(xset, threshold)
    except UnderdeterminedError:
        return False, np.inf
    if not kkt.poised:
        return False, np.inf
    return True, kkt.condition


def _check_residual(model, xset, fvals):
    res = np.max(np.abs(model.evaluate(xset.points) - fvals))
    tol = RESIDUAL_TOL * (1.0 + np.max(np.abs(fvals)))
    if not res <= tol:
        raise ResidualError(f"interpolation residual {res:.3e} exceeds {tol:.3e}")


def _check_fvals(xset, fvals):
    fvals = np.asarray(fvals, dtype=float)
    if fvals.shape[0] != xset.m:
        raise DimensionError(f"got {fvals.shape[0]} function values for {xset.m} points")
    if not np.all(np.isfinite(fvals)):
        raise ValueError("function values must be finite")
    return fvals


def interpolate_mfn(xset: InterpolationSet, fvals, kkt: KktSystem | None = None) -> QuadraticModel:
    """
    Minimum Frobenius norm quadratic interpolant of ``fvals`` on ``xset``.

    Parameters
    ----------
    xset : InterpolationSet
        Poised interpolation set.
    fvals : array_like, shape (m,)
        Data values at the points.
    kkt : KktSystem, optional
        Reuse an existing factorization of ``xset``.

    Returns
    -------
    QuadraticModel
        The interpolant, with base point the base point of ``xset``.

    Raises
    ------
    NotPoisedError
        If the KKT system is singular or too ill-conditioned.
    ResidualError
        If the interpolation conditions are violated by more than
        ``1e-10 * (1 + max|f|)`` after the solve.
    """
    fvals = _check_fvals(xset, fvals)
    if kkt is None:
        kkt = assemble_kkt(xset)
    model = kkt.model_from_solution(kkt.solve(fvals))
    _check_residual(model, xset, fvals)
    return model


def interpolate_many(xset: InterpolationSet, F, kkt: KktSystem | None = None):
    """MFN interpolants for every column of ``F`` using one factorization."""
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != xset.m:
        raise DimensionError(f"expected data of shape ({xset.m}, k), got {F.shape}")
    if kkt is None:
        kkt = assemble_kkt(xset)
    sol = kkt.solve(F)
    models = []
    for j in range(F.shape[1]):
        model = kkt.model_from_solution(sol[:, j])
        _check_residual(model, xset, F[:, j])
        models.append(model)
    return models


def interpolate_sym_broyden(xset: InterpolationSet, fvals, qprev: QuadraticModel, kkt: KktSystem | None = None) -> QuadraticModel:
    """
    Derivative-free symmetric Broyden update of ``qprev``.

    Returns the interpolant minimizing ``||H - H_prev||_F``, obtained as
    ``qprev`` plus the MFN interpolant of the residual ``f - qprev(y)``.
    """
    fvals = _check_fvals(xset, fvals)
    if qprev.n != xset.n:
        raise DimensionError(f"previous model has n={qprev.n}, set has n={xset.n}")
    correction = interpolate_mfn(xset, fvals - qprev.evaluate(xset.points), kkt)
    model = qprev.rebase(xset.base) + correction
    _check_residual(model, xset, fvals)
    return model
