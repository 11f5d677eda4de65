"""
Powell's initial set and its MFN Lagrange polynomials.

We build the set for n = 3 with m = 6 points, solve the KKT system for the
Lagrange polynomials, and compare them with their closed forms.
"""
import numpy as np

from mfnpoise import is_poised, lagrange_polynomials_numeric, powell_initial_set, powell_lagrange_all

np.set_printoptions(precision=4, suppress=True)

n, m, delta = 3, 6, 0.5
xset = powell_initial_set(n, m, delta, x0=[1.0, -2.0, 0.0])
print("points (one per row):")
print(xset.points)

ok, cond = is_poised(xset)
print(f"poised: {ok}, KKT condition estimate {cond:.3g}")

# The numeric polynomials come from one factorization shared by all m solves.
numeric = lagrange_polynomials_numeric(xset)
closed = powell_lagrange_all(n, m, delta, x0=xset.points[0])

for i, (a, b) in enumerate(zip(numeric, closed)):
    a, b = a.rebase(xset.points[0]), b.rebase(xset.points[0])
    err = max(abs(a.c - b.c), np.abs(a.g - b.g).max(), np.abs(a.H - b.H).max())
    print(f"L_{i}: c={a.c:+.3f}  g={a.g}  diag(H)={np.diag(a.H)}  |numeric - closed| = {err:.1e}")

# Each L_i is 1 at its own point and 0 at the others.
V = np.array([L.evaluate(xset.points) for L in numeric])
print("L_i(y_j):")
print(V)
