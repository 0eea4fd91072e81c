import random

import pytest


@pytest.fixture
def rng():
    return random.Random(0)


def random_int_matrix(rng, m, n, lo=-5, hi=5):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def random_unimodular(rng, n, steps=12):
    """Product of elementary integer operations, so det is +-1."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        q = rng.randint(-3, 3)
        M[i] = [M[i][k] + q * M[j][k] for k in range(n)]
        if rng.random() < 0.3:
            M[i], M[j] = M[j], M[i]
    return M
