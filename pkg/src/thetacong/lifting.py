"""Lifting a lattice of prime-power level to a lattice with an automorphism.

Given ``L`` of level ``ell^n`` this builds a lattice ``L_hat`` of rank
``e(L)`` together with an automorphism ``sigma`` of ``ell``-power order
whose fixed lattice is ``L``, and whose level is divisible neither by
``ell`` nor by any prime ``p ≡ -1 (mod ell)``.

Steps:

1. diagonalize ``L`` over the ring ``R`` of rationals whose denominators
   avoid ``ell`` and the primes ``≡ -1 (mod ell)``;
2. rescale the orthogonal basis so that ``L ⊆ H = ⊕ Z e_i``;
3. replace each ``e_i`` of norm ``a_i ell^{alpha_i}`` by a block of
   ``ell^{alpha_i}`` orthogonal vectors of norm ``a_i`` permuted
   cyclically by ``sigma``;
4. cut out the sublattice given by the congruences
   ``x_{i,1} ≡ ... ≡ x_{i,ell^alpha_i} (mod d)`` and ``sum_i x_{i,1} e_i ∈ L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from sympy import factorint

from . import algebra as alg
from .automorphism import (
    LatticeAutomorphism,
    fixed_lattice,
    fixed_subgroup_order,
    index_report,
    make_automorphism,
)
from .congruence import check_prime, find_congruent_form, verify_congruence, weight_of
from .exceptions import BudgetExceeded, InternalInconsistency, PreconditionError
from .lattice import BinaryForm, Lattice, discriminant_group, is_power_of, make_lattice
from .modforms import reduce_mod, sturm_bound
from .theta import short_vectors, theta_series

MAX_RADIUS = 2**10


def _check_ell(ell: int):
    if not alg.is_prime(ell):
        raise PreconditionError(f"{ell} is not prime")
    if ell < 5:
        raise PreconditionError(
            f"ell = {ell} is not supported: admissible representations can fail for "
            "ell = 2, and for ell = 3 the form 2x² + 3y² only represents numbers "
            "≡ 0, -1 (mod 3), each with a prime factor ≢ 1 (mod 3)")


@dataclass(frozen=True)
class Localization:
    """Rationals whose denominators only contain admissible primes.

    A prime ``p`` is admissible when ``p != ell`` and ``p ≢ -1 (mod ell)``.
    """

    ell: int

    def admissible(self, p: int) -> bool:
        return p != self.ell and p % self.ell != self.ell - 1

    def is_unit(self, q) -> bool:
        q = Fraction(q)
        if q == 0:
            return False
        return all(self.admissible(p)
                   for n in (abs(q.numerator), q.denominator)
                   for p in factorint(n))

    def contains(self, q) -> bool:
        return all(self.admissible(p) for p in factorint(Fraction(q).denominator))

    def non_unit_part(self, n: int) -> int:
        """Product of the inadmissible prime powers dividing the integer ``n``."""
        out = 1
        for p, e in factorint(abs(n)).items():
            if not self.admissible(p):
                out *= p ** e
        return out

    def split(self, q) -> tuple[Fraction, int]:
        """``q = unit * ell^alpha``; raises if ``q`` has another inadmissible factor."""
        q = Fraction(q)
        alpha = 0
        num = q.numerator
        while num % self.ell == 0:
            num //= self.ell
            alpha += 1
        unit = Fraction(num, q.denominator)
        if not self.is_unit(unit):
            raise PreconditionError(f"{q} is not a unit times a power of {self.ell}")
        return unit, alpha


# --------------------------------------------------------------------------
# admissible values of binary forms


@dataclass(frozen=True)
class Representation:
    x: int
    y: int
    value: int
    factorization: dict


def _ring(r: int):
    pts = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
           if max(abs(x), abs(y)) == r]
    pts.sort(key=lambda t: (abs(t[0]) + abs(t[1]), -t[0], -t[1]))
    return pts


def scan_order(max_radius: int = MAX_RADIUS):
    """Pairs in expanding boxes ``max(|x|,|y|) <= 1, 2, 4, ...``; new points ring by ring."""
    radius, prev = 1, 0
    while radius <= max_radius:
        for r in range(prev + 1, radius + 1):
            yield from _ring(r)
        prev, radius = radius, radius * 2


def represent_admissible(Q: BinaryForm, ell: int, max_radius: int = MAX_RADIUS
                         ) -> Representation:
    """First ``(x, y)`` in scan order with ``Q(x, y)`` free of primes ``≡ 0, -1 (mod ell)``."""
    _check_ell(ell)
    if not isinstance(Q, BinaryForm):
        Q = BinaryForm(*Q)
    if not Q.is_primitive():
        raise PreconditionError(f"{Q} is not primitive")
    loc = Localization(ell)
    for x, y in scan_order(max_radius):
        v = Q(x, y)
        fac = factorint(v)
        if all(loc.admissible(p) for p in fac):
            if math.prod(p ** e for p, e in fac.items()) != v:
                raise InternalInconsistency("factorization does not recompose")
            return Representation(x, y, v, dict(sorted(fac.items())))
    raise BudgetExceeded(f"no admissible value of {Q} with |x|, |y| <= {max_radius}")


# --------------------------------------------------------------------------
# diagonalization


def _bil(g, u, v):
    return sum((u[i] * g[i][j] * v[j] for i in range(len(u)) for j in range(len(v))
                if u[i] and v[j]), Fraction(0))


@dataclass(frozen=True)
class DiagonalizedBasis:
    """Orthogonal basis over the localization, in coordinates of the lattice basis."""

    ell: int
    basis: tuple[tuple[Fraction, ...], ...]
    norms: tuple[Fraction, ...]
    units: tuple[Fraction, ...]
    exponents: tuple[int, ...]
    scales: tuple[int, ...] = ()       # N_i with e_i / N_i spanning H ⊇ L
    d: int = 1                          # d H ⊆ L and d b even on H
    steps: tuple[str, ...] = field(default=(), compare=False)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(self.ell ** a for a in self.exponents)


def _scaled_gram(g, vecs):
    gm = tuple(tuple(_bil(g, u, v) for v in vecs) for u in vecs)
    den = alg.denominator_lcm(x for r in gm for x in r)
    return gm, den, tuple(tuple(int(x * den) for x in r) for r in gm)


def _candidates(int_gram, cap: int):
    """Primitive short vectors by increasing norm, in doubling norm windows."""
    lo = 0
    hi = min(int_gram[i][i] for i in range(len(int_gram)))
    while lo < cap:
        hi = min(hi, cap)
        for v, nv in short_vectors(int_gram, hi):
            if nv > lo and math.gcd(*v) == 1:
                yield v, nv
        lo, hi = hi, 2 * hi


def _find_pivot(loc: Localization, den, ig, d, cap: int, use_pairs: bool):
    """Integer coordinates of a vector whose norm generates the value ideal."""
    if not use_pairs:
        for v, nv in _candidates(ig, cap):
            if loc.is_unit(Fraction(nv, den) / d):
                return v, "direct"
    # pair step: y, z with coprime norm ideals, then an admissible value of the
    # binary form spanned by them
    cands = list(_candidates(ig, cap))
    for iy, (y, ny) in enumerate(cands):
        qy = Fraction(ny, den) / d
        for z, nz in cands[iy + 1:]:
            qz = Fraction(nz, den) / d
            if loc.non_unit_part(gcd(qy.numerator, qz.numerator)) != 1:
                continue
            byz = sum(y[i] * ig[i][j] * z[j] for i in range(len(y)) for j in range(len(z)))
            coeffs = [qy, Fraction(2 * byz, den) / d, qz]
            scale = alg.denominator_lcm(coeffs)
            ints = [int(c * scale) for c in coeffs]
            content = gcd(gcd(ints[0], ints[1]), ints[2])
            ints = [c // content for c in ints]
            try:
                rep = represent_admissible(BinaryForm(*ints), loc.ell)
            except BudgetExceeded:
                continue
            x = [rep.x * a + rep.y * b for a, b in zip(y, z)]
            g = math.gcd(*x)
            x = tuple(c // g for c in x)
            nx = sum(x[i] * ig[i][j] * x[j] for i in range(len(x)) for j in range(len(x)))
            if not loc.is_unit(Fraction(nx, den) / d):
                raise InternalInconsistency("admissible binary value did not give a unit norm")
            return x, f"pair Q={BinaryForm(*ints)} at ({rep.x},{rep.y})"
    raise BudgetExceeded(f"no generating vector found with norm <= {cap}")


def diagonalize(L: Lattice, ell: int, use_pairs: bool = False) -> DiagonalizedBasis:
    """Orthogonal basis of ``R ⊗ L`` whose norms are units times powers of ``ell``.

    ``use_pairs`` skips the single-vector search and always goes through
    the binary-form step (useful for exercising it).
    """
    _check_ell(ell)
    loc = Localization(ell)
    det_part = loc.non_unit_part(L.det)
    if not is_power_of(det_part, ell):
        raise PreconditionError(
            f"det {L.det} has a prime factor ≡ -1 (mod {ell}); norms cannot split")
    g = L.gram
    n = L.rank
    current = [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    found, steps = [], []
    max_div = max(L.elementary_divisors, default=1)
    while current:
        gm, den, ig = _scaled_gram(g, current)
        m = len(current)
        if m > 1:
            ig, t = alg.lll_gram(ig)
            current = [tuple(sum((t[k][j] * current[k][i] for k in range(m)), Fraction(0))
                             for i in range(n)) for j in range(m)]
        if m == 1:
            found.append(current[0])
            steps.append("last")
            break
        values = [x for r in ig for x in r if x]
        d = Fraction(loc.non_unit_part(math.gcd(*values)))
        cap = 2 * max_div * max(ig[i][i] for i in range(m))
        coords, how = _find_pivot(loc, den, ig, d, cap, use_pairs)
        steps.append(how)
        w = alg.complete_to_basis(coords)
        newvecs = [tuple(sum((w[k][j] * current[k][i] for k in range(m)), Fraction(0))
                         for i in range(n)) for j in range(m)]
        x = newvecs[0]
        bxx = _bil(g, x, x)
        found.append(x)
        current = []
        for v in newvecs[1:]:
            t = _bil(g, x, v) / bxx
            if not loc.contains(t):
                raise InternalInconsistency("projection coefficient is not in the localization")
            current.append(tuple(a - t * b for a, b in zip(v, x)))
    norms = tuple(_bil(g, e, e) for e in found)
    units, exps = zip(*(loc.split(q) for q in norms)) if norms else ((), ())
    scales, d = _integral_frame(tuple(found), norms, loc)
    basis = DiagonalizedBasis(ell, tuple(found), norms, tuple(units), tuple(exps),
                              scales, d, tuple(steps))
    _check_diagonal(L, basis, loc)
    return basis


def _integral_frame(found, norms, loc: Localization):
    """Row scalings making ``L ⊆ H`` and the least admissible ``d`` for ``H``."""
    if not found:
        return (), 1
    m = alg.rational_inverse(alg.transpose(found))
    scales = tuple(alg.denominator_lcm(row) for row in m)
    if not all(loc.is_unit(s) for s in scales):
        raise InternalInconsistency("rescaling factors are not units")
    coords = [c / s for e, s in zip(found, scales) for c in e]
    halves = [q / (2 * s * s) for q, s in zip(norms, scales)]
    d = alg.denominator_lcm(coords + halves)
    # any admissible d is a multiple of this lcm; the lcm itself must be admissible
    if not loc.is_unit(d):
        raise InternalInconsistency(f"scaling {d} is not a unit")
    return scales, d


def _check_diagonal(L: Lattice, db: DiagonalizedBasis, loc: Localization):
    g = L.gram
    for i, u in enumerate(db.basis):
        for v in db.basis[:i]:
            if _bil(g, u, v) != 0:
                raise InternalInconsistency("diagonal basis is not orthogonal")
        if not all(loc.contains(c) for c in u):
            raise InternalInconsistency("basis coordinate outside the localization")
    if L.rank and not loc.is_unit(alg.determinant(tuple(db.basis))):
        raise InternalInconsistency("diagonal basis is not an R-basis")
    if is_power_of(L.det, loc.ell):
        if sorted(db.block_sizes) != sorted(L.elementary_divisors):
            raise InternalInconsistency(
                f"ell-parts {sorted(db.block_sizes)} differ from elementary divisors "
                f"{sorted(L.elementary_divisors)}")


# --------------------------------------------------------------------------
# the lift


@dataclass(frozen=True)
class LiftedLattice:
    lattice: Lattice
    hat_lattice: Lattice
    sigma: LatticeAutomorphism
    fixed_embedding: alg.IntMatrix
    ell: int
    block_sizes: tuple[int, ...]
    norms: tuple[Fraction, ...]        # a_i after rescaling
    d: int
    checks: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "input_gram": [list(r) for r in self.lattice.gram],
            "hat_gram": [list(r) for r in self.hat_lattice.gram],
            "sigma": [list(r) for r in self.sigma.matrix],
            "sigma_order": self.sigma.order,
            "fixed_embedding": [list(r) for r in self.fixed_embedding],
            "block_sizes": list(self.block_sizes),
            "norms": [str(a) for a in self.norms],
            "d": self.d,
            "hat_det": self.hat_lattice.det,
            "hat_level": self.hat_lattice.level,
            "checks": self.checks,
        }


def _require(cond: bool, what: str):
    if not cond:
        raise InternalInconsistency(f"lift invariant failed: {what}")


def hat_lattice(L: Lattice, ell: int, diag: Optional[DiagonalizedBasis] = None) -> LiftedLattice:
    """Construct ``(L_hat, sigma)`` with fixed lattice ``L``; every invariant is asserted."""
    _check_ell(ell)
    if not is_power_of(L.level, ell):
        raise PreconditionError(f"level {L.level} is not a power of {ell}")
    loc = Localization(ell)
    if diag is None:
        diag = diagonalize(L, ell)
    n = L.rank
    if n == 0:
        hat = make_lattice(())
        return LiftedLattice(L, hat, make_automorphism(hat, ()), (), ell, (), (), 1,
                             {"trivial": True})
    e_cols = alg.transpose(diag.basis)                 # columns e_i
    m = alg.rational_inverse(e_cols)                    # a_j = sum_i m[i][j] e_i
    scales = diag.scales
    a_mat = tuple(tuple(int(x * s) for x in row) for row, s in zip(m, scales))
    e_vecs = [tuple(c / s for c in e) for e, s in zip(diag.basis, scales)]
    norms = [q / (s * s) for q, s in zip(diag.norms, scales)]
    units = [u / (s * s) for u, s in zip(diag.units, scales)]
    d = diag.d
    _require(all((d * c).denominator == 1 for e in e_vecs for c in e), "d H ⊆ L")
    _require(abs(alg.determinant(a_mat)) > 0 and loc.is_unit(alg.determinant(a_mat)),
             "[H:L] is a unit")
    for u in units:
        _require((u * d).denominator == 1 and (u * d).numerator % 2 == 0, "d * a_i is even")
    sizes = diag.block_sizes
    offsets = [sum(sizes[:i]) for i in range(n)]
    rank = sum(sizes)
    _require(rank == L.e_sum, "rank equals e(L)")
    cols = []
    for k in range(n):
        col = [0] * rank
        for i in range(n):
            for j in range(sizes[i]):
                col[offsets[i] + j] = a_mat[i][k]
        cols.append(col)
    for i in range(n):
        for j in range(1, sizes[i]):
            col = [0] * rank
            col[offsets[i] + j] = d
            cols.append(col)
    bhat = alg.transpose(cols)
    diag_norms = [units[i] for i in range(n) for _ in range(sizes[i])]
    gram = tuple(tuple(sum((bhat[t][r] * diag_norms[t] * bhat[t][s] for t in range(rank)),
                           Fraction(0)) for s in range(rank)) for r in range(rank))
    _require(all(x.denominator == 1 for row in gram for x in row), "Gram is integral")
    _require(all(gram[i][i].numerator % 2 == 0 for i in range(rank)), "Gram is even")
    hat = make_lattice(alg.as_int_matrix(gram), f"hat({L.name})" if L.name else None)
    # cyclic shift e_{i,j} -> e_{i,j+1} on ambient coordinates
    perm = [[0] * rank for _ in range(rank)]
    for i in range(n):
        for j in range(sizes[i]):
            perm[offsets[i] + (j + 1) % sizes[i]][offsets[i] + j] = 1
    binv = alg.rational_inverse(bhat)
    u = alg.matmul(binv, alg.matmul(perm, bhat))
    _require(all(Fraction(x).denominator == 1 for row in u for x in row),
             "sigma preserves the sublattice")
    sigma = make_automorphism(hat, alg.as_int_matrix(u))
    _require(is_power_of(sigma.order, ell), "sigma has ell-power order")
    _require(sigma.order == max(sizes), "sigma order is the largest block size")
    level_primes = list(factorint(hat.level))
    _require(all(loc.admissible(p) for p in level_primes),
             f"level {hat.level} avoids {ell} and primes ≡ -1 mod {ell}")
    emb = tuple(tuple(int(r == c) for c in range(n)) for r in range(rank))
    _require(alg.congruence(hat.gram, emb) == L.gram, "fixed Gram equals the input Gram")
    fixed, kernel = fixed_lattice(hat, sigma)
    _require(alg.hermite_basis(kernel) == alg.hermite_basis(emb),
             "fixed lattice is spanned by the canonical embedding")
    checks = {
        "even": True,
        "integral": True,
        "rank_equals_e": True,
        "level_admissible": True,
        "sigma_order": sigma.order,
        "fixed_gram_equal": True,
    }
    return LiftedLattice(L, hat, sigma, emb, ell, sizes, tuple(units), d, checks)


# --------------------------------------------------------------------------
# end-to-end


@dataclass
class PipelineReport:
    lattice: Lattice
    ell: int
    N: int
    lift_precision: int
    lift: LiftedLattice
    steps: list = field(default_factory=list)
    certificate: object = None

    def add(self, name: str, value):
        self.steps.append((name, value))

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "N": self.N,
            "lift_precision": self.lift_precision,
            "steps": [{"check": k, "value": v} for k, v in self.steps],
            "lift": self.lift.to_dict(),
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def main_theorem_pipeline(L: Lattice, ell: int, N: int, lift_precision: Optional[int] = None,
                          n_jobs: int = 1) -> PipelineReport:
    """Run the lift, every check on it, and the congruence search for ``L``.

    ``lift_precision`` bounds the precision of the ``theta(L_hat) ≡ theta(L)``
    comparison separately (defaults to ``N``); the congruent form itself is
    always verified to ``N``.
    """
    check_prime(ell)
    k = weight_of(L, ell)
    if N < sturm_bound(k):
        raise PreconditionError(f"precision {N} is below the Sturm bound for weight {k}")
    lp = N if lift_precision is None else lift_precision
    lift = hat_lattice(L, ell)
    rep = PipelineReport(L, ell, N, lp, lift)
    hat, sigma = lift.hat_lattice, lift.sigma
    rep.add("hat_rank", hat.rank)
    rep.add("hat_det", hat.det)
    rep.add("hat_level", hat.level)
    rep.add("sigma_order", sigma.order)
    fixed_det = fixed_subgroup_order(discriminant_group(hat), sigma.matrix)
    _require(fixed_det == 1, "Det(L_hat)^sigma is trivial")
    rep.add("det_hat_fixed_order", fixed_det)
    idx = index_report(hat, sigma, ell)
    rep.add("dual_fixed_index", idx.dual_fixed_mod_fixed)
    _require(hat.det % ell == 1, "|Det(L_hat)| ≡ 1 mod ell")
    rep.add("hat_det_mod_ell", hat.det % ell)
    _require(hat.rank % 4 == 0, "4 divides rank(L_hat)")
    rep.add("rank_mod_4", 0)
    _require((hat.rank - L.rank) % (ell - 1) == 0, "rank(L_hat) ≡ rank(L) mod ell-1")
    t_hat = theta_series(hat, lp, reduce=True, n_jobs=n_jobs)
    t_l = theta_series(L, N, n_jobs=n_jobs)
    ok, bad = verify_congruence(t_hat, t_l, ell, lp)
    _require(ok, f"theta(L_hat) ≡ theta(L) mod {ell} (first mismatch q^{bad})")
    rep.add("theta_hat_congruent_to", lp)
    cert = find_congruent_form(L, ell, N, theta=t_l)
    ok, bad = verify_congruence(t_hat, cert.form, ell, lp)
    _require(ok, "theta(L_hat) matches the certificate form")
    rep.add("certificate_weight", cert.weight)
    rep.add("certificate_form", cert.form.describe())
    rep.certificate = cert
    return rep
