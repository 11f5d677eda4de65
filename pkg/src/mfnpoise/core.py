"""
Shared value types: quadratic models, interpolation sets and l_p balls.

All types are immutable after construction. Arrays handed out by them are
read-only views, so a model can be shared freely between threads.

The exponent helpers at the bottom are the single place where the
conventions ``0**0 = 0`` and ``inf/inf = 1`` are applied.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

INF = math.inf


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class DimensionError(ValueError):
    """Raised when a point or array does not match the problem dimension."""


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """
    Quadratic polynomial ``c + g'(x - b) + 0.5 (x - b)' H (x - b)``.

    The Hessian is symmetrized on construction by averaging it with its
    transpose, so ``H`` is exactly symmetric.

    Parameters
    ----------
    c : float
        Value at the base point.
    g : array_like, shape (n,)
        Gradient at the base point.
    H : array_like, shape (n, n)
        Hessian.
    base : array_like, shape (n,), optional
        Base point ``b``. Defaults to the origin.
    """

    c: float
    g: np.ndarray
    H: np.ndarray
    base: np.ndarray = None

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=float)).ravel()
        n = g.size
        if n < 1:
            raise DimensionError("a quadratic model needs n >= 1")
        H = np.asarray(self.H, dtype=float)
        if H.shape != (n, n):
            raise DimensionError(f"hessian has shape {H.shape}, expected {(n, n)}")
        base = np.zeros(n) if self.base is None else np.asarray(self.base, dtype=float).ravel()
        if base.size != n:
            raise DimensionError(f"base point has dimension {base.size}, expected {n}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "g", _frozen(g))
        object.__setattr__(self, "H", _frozen(0.5 * (H + H.T)))
        object.__setattr__(self, "base", _frozen(base))

    @classmethod
    def zero(cls, n, base=None):
        return cls(0.0, np.zeros(n), np.zeros((n, n)), base)

    @classmethod
    def constant(cls, value, n, base=None):
        return cls(value, np.zeros(n), np.zeros((n, n)), base)

    @property
    def n(self) -> int:
        return self.g.size

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """
        Evaluate the model at one point or at the rows of a 2-D array.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise DimensionError(f"point has trailing dimension {x.shape[-1:]}, expected {self.n}")
        d = x - self.base
        val = self.c + d @ self.g + 0.5 * np.einsum("...i,ij,...j->...", d, self.H, d)
        return float(val) if np.ndim(val) == 0 else val

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"point has shape {x.shape}, expected {(self.n,)}")
        return self.g + self.H @ (x - self.base)

    def rebase(self, new_base) -> QuadraticModel:
        """Same polynomial expressed around ``new_base``."""
        new_base = np.asarray(new_base, dtype=float)
        return QuadraticModel(self.evaluate(new_base), self.gradient(new_base), self.H, new_base)

    def hessian_frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.H, "fro"))

    def __neg__(self):
        return QuadraticModel(-self.c, -self.g, -self.H, self.base)

    def __add__(self, other):
        if not isinstance(other, QuadraticModel):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError("cannot add models of different dimensions")
        other = other.rebase(self.base)
        return QuadraticModel(self.c + other.c, self.g + other.g, self.H + other.H, self.base)

    def __sub__(self, other):
        if not isinstance(other, QuadraticModel):
            return NotImplemented
        return self + (-other)

    def __mul__(self, alpha):
        alpha = float(alpha)
        return QuadraticModel(alpha * self.c, alpha * self.g, alpha * self.H, self.base)

    __rmul__ = __mul__

    def coefficients(self):
        """
        Coefficients around the origin as ``(c, g, H)``.

        Two models describe the same polynomial iff these agree.
        """
        q = self.rebase(np.zeros(self.n))
        return q.c, np.array(q.g), np.array(q.H)

    def allclose(self, other, atol=1e-8, rtol=0.0) -> bool:
        a, b = self.coefficients(), other.coefficients()
        return all(np.allclose(x, y, atol=atol, rtol=rtol) for x, y in zip(a, b))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "b": self.base.tolist(),
            "c": self.c,
            "g": self.g.tolist(),
            "H": self.H.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> QuadraticModel:
        model = cls(d["c"], d["g"], d["H"], d.get("b"))
        if "n" in d and int(d["n"]) != model.n:
            raise DimensionError(f"declared n={d['n']} but coefficients have n={model.n}")
        return model

    def to_json(self) -> str:
        # json emits repr() floats, which round-trip exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text) -> QuadraticModel:
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"QuadraticModel(n={self.n}, c={self.c!r}, g={self.g.tolist()}, H={self.H.tolist()}, base={self.base.tolist()})"


def evaluate_model(Q: QuadraticModel, x) -> float:
    return Q.evaluate(x)


def hessian_frobenius_norm(Q: QuadraticModel) -> float:
    return Q.hessian_frobenius_norm()


@dataclass(frozen=True, eq=False)
class InterpolationSet:
    """
    Ordered interpolation points ``y_0, ..., y_{m-1}`` stored as rows.

    ``base_index`` selects the point around which the interpolation system
    is assembled (0-based).
    """

    points: np.ndarray
    base_index: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionError(f"points must be a non-empty (m, n) array, got shape {pts.shape}")
        if not 0 <= self.base_index < pts.shape[0]:
            raise IndexError(f"base_index {self.base_index} outside [0, {pts.shape[0] - 1}]")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "base_index", int(self.base_index))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def base(self) -> np.ndarray:
        return self.points[self.base_index]

    def __len__(self):
        return self.m

    def __getitem__(self, i):
        return self.points[i]

    def replace(self, i, point) -> InterpolationSet:
        """New set with point ``i`` replaced; the base index is kept."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.n,):
            raise DimensionError(f"point has shape {point.shape}, expected {(self.n,)}")
        pts = np.array(self.points)
        pts[i] = point
        return InterpolationSet(pts, self.base_index)

    def with_base(self, base_index) -> InterpolationSet:
        return InterpolationSet(self.points, base_index)

    def translate(self, t) -> InterpolationSet:
        return InterpolationSet(self.points + np.asarray(t, dtype=float), self.base_index)

    def to_dict(self) -> dict:
        d = {"n": self.n, "points": self.points.tolist()}
        if self.base_index:
            d["base_index"] = self.base_index
        return d

    @classmethod
    def from_dict(cls, d) -> InterpolationSet:
        xset = cls(d["points"], d.get("base_index", 0))
        if "n" in d and int(d["n"]) != xset.n:
            raise DimensionError(f"declared n={d['n']} but points have n={xset.n}")
        return xset

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text) -> InterpolationSet:
        return cls.from_dict(json.loads(text))


def check_order(p) -> float:
    """Validate an l_p order; accepts ``inf`` or the string ``'inf'``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity"):
            return INF
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"order p must lie in [1, inf], got {p}")
    return p


def lp_norm(x, p) -> float:
    x = np.asarray(x, dtype=float)
    if p == INF:
        return float(np.max(np.abs(x))) if x.size else 0.0
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class LpBall:
    """Closed ball ``{x : ||x - center||_p <= radius}``, ``p`` in ``[1, inf]``."""

    center: np.ndarray
    radius: float
    p: float = 2.0

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float)).ravel()
        radius = float(self.radius)
        if not (radius > 0.0 and math.isfinite(radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", _frozen(center))
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "p", check_order(self.p))

    @classmethod
    def centered(cls, n, radius=1.0, p=2.0):
        return cls(np.zeros(n), radius, p)

    @property
    def n(self) -> int:
        return self.center.size

    def norm(self, x) -> float:
        return lp_norm(np.asarray(x, dtype=float) - self.center, self.p)

    def contains(self, x, rtol=0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"point has shape {x.shape}, expected {(self.n,)}")
        if self.p == INF:
            return bool(np.all(np.abs(x - self.center) <= self.radius * (1.0 + rtol)))
        return self.norm(x) <= self.radius * (1.0 + rtol)


# Extended-exponent arithmetic. Every formula that involves p goes through
# these so that p = inf and the 0**0 convention are handled in one place.

def inv_order(p) -> float:
    """``1/p`` with ``1/inf = 0``."""
    return 0.0 if p == INF else 1.0 / p


def order_ratio(p, k) -> float:
    """``(p - k)/p`` with ``inf/inf = 1``."""
    return 1.0 if p == INF else (p - k) / p


def ext_pow(base, exponent) -> float:
    """``base**exponent`` for ``base >= 0`` with ``0**0 = 0``."""
    if base < 0:
        raise ValueError("ext_pow is defined for nonnegative bases only")
    if base == 0:
        return 0.0 if exponent >= 0 else INF
    return float(base) ** exponent
