"""Objective functions with known minimizers, addressable by name."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NAMES = ("sphere", "quadratic-crossterms", "rosenbrock", "linear")


@dataclass(frozen=True)
class TestProblem:
    __test__ = False

    name: str
    n: int
    fun: object
    minimizer: np.ndarray | None
    minimum: float
    params: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.fun, self.minimizer, self.minimum))


def _sphere(x):
    x = np.asarray(x, dtype=float)
    return float(x @ x)


def _rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def get_function(name, n, seed=7) -> TestProblem:
    """
    Look up a test problem.

    ``quadratic-crossterms`` is ``c + g'x + x'Hx/2`` with ``H = A'A + I`` and
    ``A``, ``g``, ``c`` drawn uniformly from ``[-1, 1]`` with ``seed``; its
    coefficients are returned in ``params``. ``linear`` is ``sum(x)``, which
    is unbounded below (minimizer None, minimum ``-inf``).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if name == "sphere":
        return TestProblem(name, n, _sphere, np.zeros(n), 0.0)
    if name == "rosenbrock":
        if n < 2:
            raise ValueError("rosenbrock needs n >= 2")
        return TestProblem(name, n, _rosenbrock, np.ones(n), 0.0)
    if name == "linear":
        return TestProblem(name, n, lambda x: float(np.sum(x)), None, -np.inf)
    if name == "quadratic-crossterms":
        rng = np.random.default_rng(seed)
        A = rng.uniform(-1.0, 1.0, size=(n, n))
        H = A.T @ A + np.eye(n)
        g = rng.uniform(-1.0, 1.0, size=n)
        c = float(rng.uniform(-1.0, 1.0))
        xstar = -np.linalg.solve(H, g)
        fmin = c - 0.5 * g @ np.linalg.solve(H, g)

        def fun(x):
            x = np.asarray(x, dtype=float)
            return float(c + g @ x + 0.5 * x @ H @ x)

        return TestProblem(name, n, fun, xstar, float(fmin), {"c": c, "g": g, "H": H, "seed": seed})
    raise ValueError(f"unknown function {name!r}; choose from {', '.join(NAMES)}")
