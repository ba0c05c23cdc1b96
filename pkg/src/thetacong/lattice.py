"""Even positive definite lattices and their invariants."""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from . import algebra as alg
from .exceptions import (
    InternalInconsistency,
    InvalidInput,
    NotEven,
    NotPositiveDefinite,
    NotSymmetric,
    PreconditionError,
)


def is_power_of(n: int, p: int) -> bool:
    """True iff ``n = p**k`` for some ``k >= 0``."""
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class Lattice:
    """Validated even lattice given by an integer Gram matrix.

    Build instances with :func:`make_lattice`; the invariants are computed
    once there and cached on the object.
    """

    gram: alg.IntMatrix
    rank: int
    det: int
    elementary_divisors: tuple[int, ...]
    level: int
    name: Optional[str] = field(default=None, compare=False)

    @property
    def e_sum(self) -> int:
        """Sum of the elementary divisors."""
        return sum(self.elementary_divisors)

    def inverse_gram(self) -> alg.RatMatrix:
        return alg.rational_inverse(self.gram)

    def to_dict(self) -> dict:
        d = {"gram": [list(r) for r in self.gram]}
        if self.name:
            d["name"] = self.name
        return d

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return (f"Lattice({label}rank={self.rank}, det={self.det}, "
                f"divisors={self.elementary_divisors}, level={self.level})")


def _compute_level(gram) -> int:
    if not gram:
        return 1
    inv = alg.rational_inverse(gram)
    n = len(gram)
    vals = [inv[i][j] for i in range(n) for j in range(i)]
    vals += [inv[i][i] / 2 for i in range(n)]
    return alg.denominator_lcm(vals)


def make_lattice(gram, name: Optional[str] = None) -> Lattice:
    """Validate ``gram`` and return a :class:`Lattice` with cached invariants."""
    try:
        g = alg.as_int_matrix(gram)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"Gram matrix must have integer entries: {exc}") from exc
    n = len(g)
    if any(len(r) != n for r in g):
        raise InvalidInput("Gram matrix must be square")
    if not alg.is_symmetric(g):
        raise NotSymmetric("NotSymmetric: Gram matrix is not symmetric")
    if any(g[i][i] % 2 for i in range(n)):
        raise NotEven("NotEven: Gram matrix has an odd diagonal entry")
    minors = alg.leading_minors(g)
    if any(m <= 0 for m in minors):
        raise NotPositiveDefinite("NotPositiveDefinite: a leading principal minor is <= 0")
    det = int(minors[-1]) if minors else 1
    divisors = alg.smith_normal_form(g) if n else ()
    level = _compute_level(g)
    lat = Lattice(g, n, det, divisors, level, name)
    if math.prod(divisors) != det:
        raise InternalInconsistency("product of elementary divisors differs from det")
    return lat


def lattice_from_json(data) -> Lattice:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or "gram" not in data:
        raise InvalidInput('lattice JSON needs a "gram" field')
    return make_lattice(data["gram"], data.get("name"))


def load_lattice(path) -> Lattice:
    try:
        text = Path(path).read_text()
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON in {path}: {exc}") from exc
    return lattice_from_json(data)


def rank_zero() -> Lattice:
    return make_lattice((), name="zero")


def direct_sum(*lats: Lattice) -> Lattice:
    gram = alg.block_diagonal(*(l.gram for l in lats))
    names = [l.name for l in lats if l.name]
    lat = make_lattice(gram, "+".join(names) if len(names) == len(lats) and names else None)
    if lat.det != math.prod(l.det for l in lats):
        raise InternalInconsistency("det is not multiplicative under direct sum")
    if lat.level != alg.lcm(*(l.level for l in lats)):
        raise InternalInconsistency("level of direct sum is not the lcm of levels")
    return lat


def transform(L: Lattice, u) -> Lattice:
    """Lattice with basis given by the columns of ``u`` (Gram ``uᵀ G u``)."""
    return make_lattice(alg.congruence(L.gram, alg.as_int_matrix(u)), L.name)


# --------------------------------------------------------------------------
# binary forms


@dataclass(frozen=True)
class BinaryForm:
    """Integral binary quadratic form ``a x² + b xy + c y²`` (Gauss notation)."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or 4 * self.a * self.c - self.b * self.b <= 0:
            raise NotPositiveDefinite(
                f"NotPositiveDefinite: [{self.a},{self.b},{self.c}] is not positive definite")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def gram(self) -> alg.IntMatrix:
        return ((2 * self.a, self.b), (self.b, 2 * self.c))

    def __str__(self):
        return f"[{self.a},{self.b},{self.c}]"


def binary_to_lattice(f: BinaryForm | Sequence[int]) -> Lattice:
    if not isinstance(f, BinaryForm):
        f = BinaryForm(*f)
    return make_lattice(f.gram(), str(f))


# --------------------------------------------------------------------------
# discriminant group


@dataclass(frozen=True)
class DiscriminantGroup:
    """``L*/L`` as a product of cyclic groups with its quadratic form.

    Elements are tuples ``c`` with ``0 <= c_i < orders[i]``; the element is
    the coset of ``sum_i c_i * generators[i]`` (coordinates in the basis of
    ``L``).
    """

    gram: alg.IntMatrix
    orders: tuple[int, ...]
    generators: tuple[tuple[Fraction, ...], ...]
    _proj: alg.IntMatrix = field(repr=False)

    def order(self) -> int:
        return math.prod(self.orders)

    def __len__(self):
        return self.order()

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.orders))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    def vector(self, c: Sequence[int]) -> tuple[Fraction, ...]:
        n = len(self.gram)
        out = [Fraction(0)] * n
        for ci, g in zip(c, self.generators):
            if ci:
                for k in range(n):
                    out[k] += ci * g[k]
        return tuple(out)

    def reduce(self, y: Sequence) -> tuple[int, ...]:
        """Canonical coordinates of the coset ``y + L`` for ``y`` in ``L*``."""
        z = alg.matvec(self.gram, [Fraction(v) for v in y])
        if any(Fraction(v).denominator != 1 for v in z):
            raise PreconditionError("vector is not in the dual lattice")
        z = [int(v) for v in z]
        return tuple(sum(p * v for p, v in zip(row, z)) % d
                     for row, d in zip(self._proj, self.orders))

    def add(self, c1, c2):
        return tuple((x + y) % d for x, y, d in zip(c1, c2, self.orders))

    def neg(self, c):
        return tuple((-x) % d for x, d in zip(c, self.orders))

    def scale(self, k: int, c):
        return tuple((k * x) % d for x, d in zip(c, self.orders))

    def bbar(self, c1, c2) -> Fraction:
        """Induced bilinear form, value in ``[0, 1)``."""
        v1, v2 = self.vector(c1), self.vector(c2)
        return sum((x * y for x, y in zip(v1, alg.matvec(self.gram, v2))), Fraction(0)) % 1

    def qbar(self, c) -> Fraction:
        """Induced quadratic form ``½ b(x, x) mod 1``, value in ``[0, 1)``."""
        v = self.vector(c)
        return (sum((x * y for x, y in zip(v, alg.matvec(self.gram, v))), Fraction(0)) / 2) % 1

    def qbar_table(self) -> tuple[np.ndarray, int]:
        """Numerators of ``qbar`` over all elements (row-major), scaled by ``denominator``.

        Returns ``(table, denominator)``; vectorised so that groups with
        up to about 10⁶ elements stay cheap.
        """
        m = len(self.orders)
        qs = [self.qbar(tuple(int(i == j) for j in range(m))) for i in range(m)]
        bs = {(i, j): self.bbar(tuple(int(k == i) for k in range(m)),
                                tuple(int(k == j) for k in range(m)))
              for i in range(m) for j in range(i + 1, m)}
        den = alg.denominator_lcm(list(qs) + list(bs.values()))
        if m == 0:
            return np.zeros(1, dtype=np.int64), 1
        grids = np.meshgrid(*(np.arange(d, dtype=np.int64) for d in self.orders), indexing="ij")
        total = np.zeros(grids[0].shape, dtype=np.int64)
        for i in range(m):
            total = (total + (int(qs[i] * den) % den) * (grids[i] * grids[i] % den)) % den
            for j in range(i + 1, m):
                total = (total + (int(bs[i, j] * den) % den) * (grids[i] * grids[j] % den)) % den
        return total.ravel(), den


def discriminant_group(L: Lattice) -> DiscriminantGroup:
    g = L.gram
    if L.rank == 0:
        return DiscriminantGroup(g, (), (), ())
    d, u, v = alg.smith_decomposition(g)
    idx = [i for i in range(L.rank) if d[i][i] > 1]
    orders = tuple(d[i][i] for i in idx)
    gens = tuple(tuple(Fraction(v[k][i], d[i][i]) for k in range(L.rank)) for i in idx)
    proj = tuple(u[i] for i in idx)
    grp = DiscriminantGroup(g, orders, gens, proj)
    if grp.order() != L.det:
        raise InternalInconsistency("discriminant group order differs from det")
    return grp


def gauss_sum(L: Lattice) -> complex:
    """``sum over rho in L*/L of exp(2 pi i qbar(rho))`` in double precision."""
    grp = discriminant_group(L)
    table, den = grp.qbar_table()
    return complex(np.exp(2j * np.pi * table.astype(np.float64) / den).sum())


def milgram_residual(L: Lattice) -> float:
    """``|gauss_sum(L) - exp(2 pi i rank / 8) sqrt(det)|``."""
    expected = cmath.exp(2j * cmath.pi * L.rank / 8) * math.sqrt(L.det)
    return abs(gauss_sum(L) - expected)


# --------------------------------------------------------------------------
# weight residue


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def weight_residue(L: Lattice, ell: int) -> int:
    """``e(L)/2 mod (ell - 1)``, cross-checked against the rank/determinant formula."""
    if not is_power_of(L.level, ell):
        raise PreconditionError(f"level {L.level} is not a power of {ell}")
    if L.rank % 2 or L.e_sum % 2:
        raise InternalInconsistency("lattice of odd-prime-power level with odd rank or e(L)")
    lhs = (L.e_sum // 2) % (ell - 1)
    if is_square(L.det):
        rhs = (L.rank // 2) % (ell - 1)
    else:
        rhs = ((L.rank + ell - 1) // 2) % (ell - 1)
    if lhs != rhs:
        raise InternalInconsistency(
            f"e(L)/2 = {L.e_sum // 2} and the rank formula disagree mod {ell - 1}")
    return lhs
