import numpy as np
import pytest

from mfnpoise.core import LpBall
from mfnpoise.poisedness import random_poised_set


def random_sets(seed, n, count, p=2.0, radius=1.0, m_range=None):
    """Seeded random poised sets with the first point at the ball center."""
    rng = np.random.default_rng(seed)
    lo, hi = m_range or (n + 2, (n + 1) * (n + 2) // 2)
    ball = LpBall(np.zeros(n), radius, p)
    for _ in range(count):
        m = int(rng.integers(lo, hi + 1))
        yield random_poised_set(rng, n, m, ball)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
