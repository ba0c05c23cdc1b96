"""Packaged example lattices and the constructions behind the unimodular ones."""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from importlib import resources

from . import algebra as alg
from .lattice import Lattice, lattice_from_json, make_lattice

FIXTURES = ("E8", "Leech", "F", "[1,1,2]", "[1,1,3]", "[2,1,3]", "[2,1,4]", "[3,1,4]", "[4,3,5]")

_FILES = {name: name.strip("[]").replace(",", "_") if name.startswith("[") else name.lower()
          for name in FIXTURES}


def fixture_path(name: str):
    if name not in _FILES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("thetacong") / "data" / f"{_FILES[name]}.json"


@lru_cache(maxsize=None)
def load_fixture(name: str) -> Lattice:
    data = json.loads(fixture_path(name).read_text())
    return lattice_from_json(data)


def e8_gram() -> alg.IntMatrix:
    """Cartan matrix of E8 (Bourbaki labelling)."""
    edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return alg.as_int_matrix(g)


QR23 = frozenset(pow(x, 2, 23) for x in range(1, 23))


def golay_generators() -> list[tuple[int, ...]]:
    """Twelve generators of the extended binary Golay code.

    Eleven cyclic shifts of the quadratic-residue code of length 23,
    extended by an overall parity bit, plus the all-ones word.
    """
    base = [1 if (i == 0 or i in QR23) else 0 for i in range(23)]
    rows = []
    for s in range(11):
        word = [base[(i - s) % 23] for i in range(23)]
        rows.append(tuple(word + [sum(word) % 2]))
    rows.append((1,) * 24)
    return rows


def golay_code() -> set[tuple[int, ...]]:
    gens = golay_generators()
    code = set()
    for mask in itertools.product((0, 1), repeat=len(gens)):
        w = [0] * 24
        for bit, g in zip(mask, gens):
            if bit:
                w = [a ^ b for a, b in zip(w, g)]
        code.add(tuple(w))
    return code


def leech_gram() -> alg.IntMatrix:
    """Leech lattice Gram matrix from the Golay code, LLL-reduced.

    Coordinates are scaled by ``sqrt 8``: the lattice is generated by
    ``2c`` for Golay words ``c``, ``4(e_i ± e_j)`` and ``(-3, 1^23)``;
    the Gram matrix is ``BᵀB / 8``.
    """
    gens = [tuple(2 * x for x in c) for c in golay_generators()]
    for j in range(1, 24):
        gens.append(tuple(4 if i in (0, j) else 0 for i in range(24)))
        gens.append(tuple(4 if i == 0 else (-4 if i == j else 0) for i in range(24)))
    gens.append((-3,) + (1,) * 23)
    basis = alg.hermite_basis(alg.transpose(gens))
    gram8 = alg.congruence(alg.identity(24), basis)
    gram = tuple(tuple(x // 8 for x in r) for r in gram8)
    if any(x % 8 for r in gram8 for x in r):
        raise ArithmeticError("Leech generators are not integral after scaling")
    reduced, _ = alg.lll_gram(gram)
    return reduced


def build_fixture_data() -> dict[str, dict]:
    """Fixture JSON payloads, regenerated from scratch."""
    binaries = {"[1,1,2]": (1, 1, 2), "[1,1,3]": (1, 1, 3), "[2,1,3]": (2, 1, 3),
                "[2,1,4]": (2, 1, 4), "[3,1,4]": (3, 1, 4), "[4,3,5]": (4, 3, 5)}
    out = {
        "E8": e8_gram(),
        "Leech": leech_gram(),
        "F": ((2, 1, 1, 1), (1, 2, 0, 1), (1, 0, 4, 2), (1, 1, 2, 4)),
    }
    for name, (a, b, c) in binaries.items():
        out[name] = ((2 * a, b), (b, 2 * c))
    data = {}
    for name, g in out.items():
        L = make_lattice(g, name)
        data[name] = {"name": name, "gram": [list(r) for r in L.gram]}
    return data
