"""
How the constant of well-poisedness of Powell's set depends on m and p.

For every m in [n+2, 2n+1] and a range of p we compute the constant
numerically, print it next to the known closed form when there is one,
and check the general bounds.
"""
from mfnpoise import lambda_p_bounds, sweep_lambda_vs_m
from mfnpoise.core import INF

n = 6
orders = (1.0, 1.5, 2.0, 2.5, 3.0, 4.0, INF)

print(f"n = {n}; columns are p, rows are m; '*' marks values without a closed form")
print("   m " + "".join(f"{'p=' + format(p, 'g'):>12}" for p in orders))
table = {p: sweep_lambda_vs_m(n, p, mode="both") for p in orders}
for row in range(n):
    m = n + 2 + row
    cells = []
    for p in orders:
        r = table[p][row]
        lo, hi = lambda_p_bounds(n, m, p)
        assert lo - 1e-8 <= r.numeric <= hi + 1e-8
        mark = "*" if r.closed is None else " "
        cells.append(f"{r.numeric:11.6f}{mark}")
    print(f"{m:4d} " + "".join(cells))

worst = max(r.abs_diff for rows in table.values() for r in rows if r.abs_diff is not None)
print(f"largest |numeric - closed| over the table: {worst:.2e}")

# Larger m never hurts here: for each p the constant is nonincreasing in m.
for p, rows in table.items():
    vals = [r.numeric for r in rows]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:])), p
print("the constant is nonincreasing in m for every p in the table")
