from __future__ import annotations

import random

import pytest

from quadvol.lattice import GramMatrix, U, V, direct_sum

D = GramMatrix.diag

CORPUS = {
    "<1>": D(1),
    "<3>": D(3),
    "<2>": D(2),
    "U": U,
    "V": V,
    "diag(1,1)": D(1, 1),
    "diag(1,-1)": D(1, -1),
    "diag(2,3)": D(2, 3),
    "diag(1,1,1)": D(1, 1, 1),
    "<2>+U": direct_sum(D(2), U),
    "<6>+U": direct_sum(D(6), U),
    "diag(6,-1,-1)": D(6, -1, -1),
    "diag(11,-1,-1)": D(11, -1, -1),
    "diag(3,-5,-1)": D(3, -5, -1),
}


def random_unimodular(n: int, rng: random.Random, steps: int = 6, bound: int = 2) -> list[list[int]]:
    """Product of random elementary matrices (row additions and swaps)."""
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 1:
        return [[rng.choice((1, -1))]]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        if rng.random() < 0.2:
            P[i], P[j] = P[j], P[i]
        else:
            c = rng.choice([k for k in range(-bound, bound + 1) if k])
            P[i] = [a + c * b for a, b in zip(P[i], P[j])]
    if rng.random() < 0.5:
        P[0] = [-a for a in P[0]]
    return P


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20261015)
