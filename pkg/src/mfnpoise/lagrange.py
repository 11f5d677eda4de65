"""
Minimum Frobenius norm Lagrange polynomials.

``L_i`` is the MFN interpolant of the Kronecker data ``L_i(y_j) = delta_ij``.
Any MFN interpolant is then ``sum_i f(y_i) L_i``.

Indices are 0-based throughout: ``L_0`` belongs to the base point of a Powell
set, ``L_1..L_n`` to the positive steps and ``L_{n+1}..L_{m-1}`` to the
negative steps.
"""
import numpy as np

from .core import QuadraticModel
from .interpolation import assemble_kkt, interpolate_many


def lagrange_polynomials_numeric(xset, kkt=None):
    """
    All MFN Lagrange polynomials of a poised set.

    A single factorization of the KKT system is shared by the ``m`` solves.

    Returns
    -------
    list of QuadraticModel
        ``L_0, ..., L_{m-1}``, each based at the base point of ``xset``.
    """
    if kkt is None:
        kkt = assemble_kkt(xset)
    return interpolate_many(xset, np.eye(xset.m), kkt)


def powell_lagrange_closed_form(n, m, delta, i, x0=None) -> QuadraticModel:
    """
    Closed-form ``L_i`` of Powell's initial set (0-based ``i``).

    With ``k = m - n - 1`` (the number of coordinates stepped in both
    directions) and ``D = delta``, in coordinates relative to ``x0``:

    * ``i = 0``: ``1 - sum_{j<k} x_j**2 / D**2 - sum_{k<=j<n} x_j / D``
    * ``1 <= i <= k``: ``x_{i-1}**2 / (2 D**2) + x_{i-1} / (2 D)``
    * ``k < i <= n``: ``x_{i-1} / D``
    * ``n < i < m``: ``x_{i-n-1}**2 / (2 D**2) - x_{i-n-1} / (2 D)``
    """
    n, m, i = int(n), int(m), int(i)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not n + 2 <= m <= 2 * n + 1:
        raise ValueError(f"m must lie in [n+2, 2n+1] = [{n + 2}, {2 * n + 1}], got {m}")
    if not 0 <= i < m:
        raise IndexError(f"Lagrange index {i} outside [0, {m - 1}]")
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")

    k = m - n - 1
    g = np.zeros(n)
    H = np.zeros((n, n))
    c = 0.0
    if i == 0:
        c = 1.0
        H[range(k), range(k)] = -2.0 / delta**2
        g[k:] = -1.0 / delta
    elif i <= k:
        H[i - 1, i - 1] = 1.0 / delta**2
        g[i - 1] = 0.5 / delta
    elif i <= n:
        g[i - 1] = 1.0 / delta
    else:
        j = i - n - 1
        H[j, j] = 1.0 / delta**2
        g[j] = -0.5 / delta
    base = None if x0 is None else np.asarray(x0, dtype=float)
    return QuadraticModel(c, g, H, base)


def powell_lagrange_all(n, m, delta, x0=None):
    return [powell_lagrange_closed_form(n, m, delta, i, x0) for i in range(m)]
