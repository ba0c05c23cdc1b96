"""Automorphisms of prime-power order, fixed lattices and their discriminant data.

Convention: an automorphism is an integer matrix ``U`` acting on basis
coordinates, ``x -> U x``; it is an isometry when ``Uᵀ G U = G``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import algebra as alg
from .exceptions import (
    InternalInconsistency,
    InvalidInput,
    NotIsometry,
    OrderBoundExceeded,
    PreconditionError,
)
from .lattice import (
    DiscriminantGroup,
    Lattice,
    discriminant_group,
    is_power_of,
    is_square,
    make_lattice,
)
from .congruence import verify_congruence
from .theta import theta_series

DEFAULT_ORDER_BOUND = 10**6


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _matpow(u, e: int):
    result = alg.identity(len(u))
    base = u
    while e:
        if e & 1:
            result = alg.matmul(result, base)
        e >>= 1
        if e:
            base = alg.matmul(base, base)
    return result


@dataclass(frozen=True)
class LatticeAutomorphism:
    lattice: Lattice
    matrix: alg.IntMatrix
    order: int

    def power(self, e: int) -> alg.IntMatrix:
        return _matpow(self.matrix, e)

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "order": self.order}


def matrix_order(u, bound: int = DEFAULT_ORDER_BOUND) -> int:
    n = len(u)
    ident = alg.identity(n)
    p = u
    for k in range(1, bound + 1):
        if p == ident:
            return k
        p = alg.matmul(p, u)
    raise OrderBoundExceeded(f"matrix order exceeds {bound}")


def make_automorphism(L: Lattice, u, order_bound: int = DEFAULT_ORDER_BOUND
                      ) -> LatticeAutomorphism:
    try:
        m = alg.as_int_matrix(u)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"automorphism must be an integer matrix: {exc}") from exc
    if alg.shape(m) != (L.rank, L.rank):
        raise InvalidInput(f"automorphism must be {L.rank}x{L.rank}")
    if alg.congruence(L.gram, m) != L.gram:
        raise NotIsometry("NotIsometry: Uᵀ G U differs from G")
    order = matrix_order(m, order_bound)
    for p in _prime_factors(order):
        if _matpow(m, order // p) == alg.identity(L.rank):
            raise InternalInconsistency("order computation is not minimal")
    return LatticeAutomorphism(L, m, order)


def load_automorphism(L: Lattice, path) -> LatticeAutomorphism:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict) or "matrix" not in data:
        raise InvalidInput('automorphism JSON needs a "matrix" field')
    return make_automorphism(L, data["matrix"])


def fixed_lattice(L: Lattice, sigma: LatticeAutomorphism) -> tuple[Lattice, alg.IntMatrix]:
    """Fixed sublattice and its embedding matrix ``B`` (columns = basis in ``L``)."""
    n = L.rank
    diff = tuple(tuple(sigma.matrix[i][j] - int(i == j) for j in range(n)) for i in range(n))
    b = alg.integer_kernel(diff)
    if not b or not b[0]:
        return make_lattice(()), tuple(() for _ in range(n))
    gram = alg.congruence(L.gram, b)
    return make_lattice(gram), b


def _check_power_order(sigma: LatticeAutomorphism, ell: int):
    if not is_power_of(sigma.order, ell):
        raise PreconditionError(f"automorphism order {sigma.order} is not a power of {ell}")


def check_fixed_congruence(L: Lattice, sigma: LatticeAutomorphism, ell: int, N: int) -> bool:
    """``theta_L ≡ theta_{L^sigma} (mod ell)`` up to ``q^N``; raises when it fails."""
    _check_power_order(sigma, ell)
    fixed, _ = fixed_lattice(L, sigma)
    t1 = theta_series(L, N, reduce=True)
    t2 = theta_series(fixed, N, reduce=True)
    ok, bad = verify_congruence(t1, t2, ell, N)
    if not ok:
        raise InternalInconsistency(
            f"theta of lattice and fixed lattice differ mod {ell} at q^{bad}")
    return True


def group_action_matrix(group: DiscriminantGroup, u) -> alg.IntMatrix:
    """Matrix (columns = images of generators) of ``u`` acting on ``L*/L``."""
    cols = []
    for g in group.generators:
        cols.append(group.reduce(alg.matvec(u, g)))
    return alg.transpose(cols) if cols else ()


def fixed_subgroup_order(group: DiscriminantGroup, u) -> int:
    """Order of the subgroup of ``L*/L`` fixed by ``u``.

    With ``A`` the action on the cyclic factors and ``D`` their orders, the
    fixed subgroup is the kernel of ``A - 1`` on ``Z^m / D Z^m``, whose order
    equals the order of the cokernel of ``[D | A - 1]``.
    """
    m = len(group.orders)
    if m == 0:
        return 1
    a = group_action_matrix(group, u)
    block = tuple(
        tuple(group.orders[i] if i == j else 0 for j in range(m))
        + tuple(a[i][j] - int(i == j) for j in range(m))
        for i in range(m)
    )
    return math.prod(alg.invariant_factors(block))


@dataclass(frozen=True)
class IndexReport:
    ell: int
    dual_fixed_mod_fixed: int      # |(L*)^σ / L^σ|
    det_fixed_lattice: int         # |Det(L^σ)|
    fixed_det_group: int           # |Det(L)^σ|
    index_in_det_fixed: int
    index_in_fixed_det: int
    fixed_rank: int


def _exact_sqrt(q: Fraction) -> Fraction:
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise InternalInconsistency(f"{q} is not a rational square")
    return Fraction(rn, rd)


def index_report(L: Lattice, sigma: LatticeAutomorphism, ell: int) -> IndexReport:
    """Sizes of ``(L*)^σ/L^σ``, ``Det(L^σ)`` and ``Det(L)^σ`` and the two indices."""
    _check_power_order(sigma, ell)
    fixed, b = fixed_lattice(L, sigma)
    grp = discriminant_group(L)
    fixed_det = fixed_subgroup_order(grp, sigma.matrix)
    if fixed.rank == 0:
        dual_fixed = 1
    else:
        # (L*)^σ = {G⁻¹ z : (U - 1) G⁻¹ z = 0}
        n = L.rank
        ginv = L.inverse_gram()
        diff = tuple(tuple(Fraction(sigma.matrix[i][j] - int(i == j)) for j in range(n))
                     for i in range(n))
        z = alg.integer_kernel(alg.matmul(diff, ginv))
        c = alg.matmul(ginv, z)
        vol_dual = alg.determinant(alg.congruence(L.gram, c))
        ratio = Fraction(fixed.det) / Fraction(vol_dual)
        dual_fixed = _exact_sqrt(ratio)
        if dual_fixed.denominator != 1:
            raise InternalInconsistency("fixed lattice is not contained in the fixed dual")
        dual_fixed = int(dual_fixed)
    if fixed.det % dual_fixed or fixed_det % dual_fixed:
        raise InternalInconsistency("(L*)^σ/L^σ does not embed in both groups")
    i1, i2 = fixed.det // dual_fixed, fixed_det // dual_fixed
    if not (is_power_of(i1, ell) and is_power_of(i2, ell)):
        raise InternalInconsistency(f"indices {i1}, {i2} are not powers of {ell}")
    if L.det % ell and dual_fixed != fixed_det:
        raise InternalInconsistency(
            f"{ell} does not divide det(L) but |(L*)^σ/L^σ| != |Det(L)^σ|")
    return IndexReport(ell, dual_fixed, fixed.det, fixed_det, i1, i2, fixed.rank)
