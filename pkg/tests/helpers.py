"""Random lattices and basis changes shared by the test modules."""

import random

from thetacong import algebra as alg
from thetacong.lattice import make_lattice, transform
from thetacong.exceptions import InvalidInput

L112 = ((2, 1), (1, 4))
F_GRAM = ((2, 1, 1, 1), (1, 2, 0, 1), (1, 0, 4, 2), (1, 1, 2, 4))


def random_unimodular(rng: random.Random, n: int, steps: int = 6, size: int = 2):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return alg.as_int_matrix([[rng.choice((1, -1))]] if n else [])
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-size, size)
        for r in range(n):
            u[r][j] += q * u[r][i]
    if rng.random() < 0.5:
        i, j = rng.sample(range(n), 2)
        for r in range(n):
            u[r][i], u[r][j] = u[r][j], u[r][i]
    return alg.as_int_matrix(u)


def random_even_lattice(rng: random.Random, rank: int, bound: int = 20):
    """Random positive definite even Gram with entries of absolute value <= bound."""
    while True:
        g = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            # small diagonals half the time, so that short vectors are plentiful
            g[i][i] = 2 * rng.randint(1, rng.choice((3, bound // 2)))
            for j in range(i):
                off = min(bound // 2, max(g[i][i], g[j][j]) // 2)
                g[i][j] = g[j][i] = rng.randint(-off, off)
        try:
            return make_lattice(g)
        except InvalidInput:
            continue


def random_level_ell_lattice(rng: random.Random, ell: int):
    """Random even lattice of level ell with rank <= 3 and entries <= 20.

    Such lattices only exist for ell = 7 here: they are the basis changes
    of the [1,1,2] lattice (see the decisions ledger).
    """
    if ell != 7:
        raise ValueError("no even lattice of rank <= 3 has level 5")
    base = make_lattice(L112)
    while True:
        L = transform(base, random_unimodular(rng, 2, steps=3, size=2))
        if max(abs(x) for r in L.gram for x in r) <= 20:
            return L
