"""Powell's initial interpolation set."""
import numpy as np

from .core import InterpolationSet


def powell_initial_set(n, m=None, delta=1.0, x0=None) -> InterpolationSet:
    """
    Build the initial set used by NEWUOA-type methods.

    The points are ``x0``, then ``x0 + delta*e_j`` for ``j = 1..n``, then
    ``x0 - delta*e_j`` for ``j = 1..n``, truncated to the first ``m``.

    Parameters
    ----------
    n : int
        Dimension, at least 1.
    m : int, optional
        Number of points, in ``[n + 2, 2n + 1]``. Defaults to ``2n + 1``.
    delta : float
        Step length (initial trust-region radius).
    x0 : array_like, optional
        Starting point, the origin by default.

    Returns
    -------
    InterpolationSet
        The set with base index 0 (the starting point).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = 2 * n + 1 if m is None else int(m)
    if not n + 2 <= m <= 2 * n + 1:
        raise ValueError(f"m must lie in [n+2, 2n+1] = [{n + 2}, {2 * n + 1}], got {m}")
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel()
    if x0.size != n:
        raise ValueError(f"x0 has dimension {x0.size}, expected {n}")

    eye = np.eye(n)
    steps = np.vstack([np.zeros((1, n)), delta * eye, -delta * eye])[:m]
    return InterpolationSet(x0 + steps, base_index=0)
