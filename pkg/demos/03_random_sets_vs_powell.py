"""
Can a random interpolation set containing the ball center do better than
Powell's set with m = 2n + 1?

When p is small enough the answer is known to be no. We sample sets
for a few dimensions and orders, including some p beyond that range, and
report the best constant found next to Powell's.
"""
import numpy as np

from mfnpoise import LpBall, optimality_applies, optimality_gap, optimality_threshold, random_poised_set
from mfnpoise.core import INF

rng = np.random.default_rng(7)
trials = 40

print(f"{'n':>2} {'p':>5} {'p limit':>8} {'covered':>8} {'Powell':>8} {'best random':>12} {'method':>18}")
for n in (2, 3, 4):
    for p in (1.0, 2.0, 4.0, INF):
        ball = LpBall.centered(n, 1.0, p)
        best, method = np.inf, ""
        for _ in range(trials):
            m = int(rng.integers(n + 2, (n + 1) * (n + 2) // 2 + 1))
            gap = optimality_gap(random_poised_set(rng, n, m, ball), ball)
            if gap.value < best:
                best, method = gap.value, gap.report.method
        print(f"{n:>2} {p:>5g} {optimality_threshold(n):>8.3g} {str(optimality_applies(n, p)):>8} "
              f"{gap.reference:>8.4g} {best:>12.4g} {method:>18}")
