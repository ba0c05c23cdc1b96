"""Level-one forms congruent to theta series of lattices of prime-power level.

The existence of the form is guaranteed; here it is found by linear
algebra over ``F_ell`` on the first ``dim M_k`` coefficients and then
checked coefficientwise to a precision past the Sturm bound.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import algebra as alg
from .exceptions import InternalInconsistency, PreconditionError
from .lattice import Lattice, discriminant_group, is_power_of, is_square, make_lattice
from .modforms import (
    FpSeries,
    ModularForm,
    _eisenstein_series,
    dim_Mk,
    form_from_coords,
    monomial_basis,
    monomial_expansion,
    reduce_mod,
    sturm_bound,
)
from .qseries import QSeries
from .theta import theta_series


def check_prime(ell: int, minimum: int = 5) -> None:
    if not alg.is_prime(ell):
        raise PreconditionError(f"{ell} is not prime")
    if ell < minimum:
        raise PreconditionError(f"the prime must be at least {minimum}, got {ell}")


def default_precision(k: int) -> int:
    return max(20, k // 12 + 5)


@dataclass(frozen=True)
class CongruenceCertificate:
    """``theta_L ≡ form (mod ell)`` checked on all coefficients up to ``verified_to``."""

    lattice: Lattice
    ell: int
    weight: int
    form: ModularForm
    verified_to: int
    sturm_bound: int
    theta: QSeries = field(repr=False)

    @property
    def reduced(self) -> FpSeries:
        return reduce_mod(self.form, self.ell)

    def table(self) -> list[tuple[int, int, int, int]]:
        """Rows ``(n, r_L(n), f_n, r_L(n) mod ell)``."""
        red = self.reduced
        return [(n, int(self.theta[n]), int(self.form.expansion[n]), red[n])
                for n in range(self.verified_to + 1)]

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice.to_dict(),
            "ell": self.ell,
            "weight": self.weight,
            "monomials": [list(m) for m in self.form.monomials],
            "coords": [int(c) for c in self.form.coords],
            "form": self.form.describe(),
            "verified_to": self.verified_to,
            "sturm_bound": self.sturm_bound,
            "reduced_expansion": list(self.reduced.coeffs),
        }


def verify_certificate_dict(data: dict) -> bool:
    """Re-check a certificate given as its JSON dictionary."""
    L = make_lattice(data["lattice"]["gram"])
    ell, k, N = data["ell"], data["weight"], data["verified_to"]
    f = form_from_coords(k, data["coords"], N)
    ok, _ = verify_congruence(theta_series(L, N), f.expansion, ell, N)
    return ok and list(reduce_mod(f, ell).coeffs) == data["reduced_expansion"]


def verify_congruence(s1, s2, ell: int, N: int) -> tuple[bool, Optional[int]]:
    """Compare two series mod ``ell`` up to ``q^N``; return ``(ok, first_mismatch)``."""
    a = s1.expansion if isinstance(s1, ModularForm) else s1
    b = s2.expansion if isinstance(s2, ModularForm) else s2
    if a.precision < N or b.precision < N:
        raise PreconditionError(
            f"series precisions {a.precision}, {b.precision} are below {N}")
    ra = reduce_mod(QSeries(a.coeffs[: N + 1]), ell)
    rb = reduce_mod(QSeries(b.coeffs[: N + 1]), ell)
    for n in range(N + 1):
        if ra[n] != rb[n]:
            return False, n
    return True, None


def weight_of(L: Lattice, ell: int) -> int:
    if not is_power_of(L.level, ell):
        raise PreconditionError(f"level {L.level} is not a power of {ell}")
    if L.e_sum % 4:
        raise InternalInconsistency(f"e(L) = {L.e_sum} is not divisible by 4")
    return L.e_sum // 2


def solve_reduced_coords(theta: QSeries, k: int, ell: int) -> tuple[int, ...]:
    """``F_ell``-coordinates of the weight-``k`` form matching ``theta`` on ``dim M_k`` terms."""
    monos = monomial_basis(k)
    dim = len(monos)
    exps = [monomial_expansion(m, max(theta.precision, dim - 1)) for m in monos]
    a = tuple(tuple(int(exps[j][i]) % ell for j in range(dim)) for i in range(dim))
    b = tuple(int(theta[i]) % ell for i in range(dim))
    x = alg.solve_mod_p(a, b, ell)
    if x is None:
        raise InternalInconsistency("no F_ell solution for the leading theta coefficients")
    return x


def find_congruent_form(L: Lattice, ell: int, N: Optional[int] = None,
                        theta: Optional[QSeries] = None, n_jobs: int = 1
                        ) -> CongruenceCertificate:
    """Find an integral level-one form ``f`` of weight ``e(L)/2`` with ``theta_L ≡ f``."""
    check_prime(ell)
    k = weight_of(L, ell)
    sb = sturm_bound(k)
    if N is None:
        N = default_precision(k)
    if N < sb:
        raise PreconditionError(f"precision {N} is below the Sturm bound {sb} for weight {k}")
    if theta is None:
        theta = theta_series(L, N, n_jobs=n_jobs)
    if theta.precision < N:
        raise PreconditionError("supplied theta series is shorter than the requested precision")
    coords = solve_reduced_coords(theta, k, ell)
    form = form_from_coords(k, coords, N)
    ok, bad = verify_congruence(theta, form, ell, N)
    if not ok:
        raise InternalInconsistency(
            f"theta series and weight-{k} form disagree mod {ell} at q^{bad}")
    return CongruenceCertificate(L, ell, k, form, N, sb, QSeries(theta.coeffs[: N + 1]))


@dataclass(frozen=True)
class GradingTag:
    residue: int
    modulus: int


def grading_tag(L: Lattice, ell: int,
                certificate: Optional[CongruenceCertificate] = None) -> GradingTag:
    check_prime(ell)
    t = weight_of(L, ell) % (ell - 1)
    if certificate is not None and certificate.weight % (ell - 1) != t:
        raise InternalInconsistency("certificate weight disagrees with the grading tag")
    return GradingTag(t, ell - 1)


# --------------------------------------------------------------------------
# E6 from neighbour lattices


@dataclass(frozen=True)
class NeighborReport:
    ell: int
    lines: int
    isotropic_lines: int
    neighbor_levels: tuple[int, ...]
    series: FpSeries


def projective_points(dim: int, p: int):
    """Canonical representatives of lines in ``F_p^dim``: first nonzero entry is 1."""
    for lead in range(dim):
        for tail in itertools.product(range(p), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + tail


def neighbor_lattice(L: Lattice, group, u) -> Lattice:
    """The lattice ``{x ∈ L* : x + L ∈ F_ell·u}`` with the restricted form."""
    y = group.vector(u)
    n = L.rank
    cols = [tuple(int(i == j) for i in range(n)) for j in range(n)] + [y]
    basis = alg.rational_span_basis(alg.transpose(cols))
    gram = alg.congruence(L.gram, basis)
    if any(Fraction(v).denominator != 1 for r in gram for v in r):
        raise InternalInconsistency(f"neighbour lattice for {u} is not integral")
    return make_lattice(alg.as_int_matrix(gram))


def eisenstein_from_neighbors(L: Lattice, ell: int, N: int, n_jobs: int = 1
                              ) -> tuple[FpSeries, NeighborReport]:
    """Sum of neighbour theta series minus ``(#lines - 1) theta_L``, reduced mod ``ell``."""
    check_prime(ell)
    if L.rank != 12:
        raise PreconditionError("the neighbour construction needs rank 12")
    if L.level != ell:
        raise PreconditionError(f"level must be exactly {ell}, got {L.level}")
    if not is_square(L.det) or not is_power_of(L.det, ell) or L.det < ell ** 4:
        raise PreconditionError(f"determinant must be {ell}^(2n) with n >= 2, got {L.det}")
    grp = discriminant_group(L)
    dim = len(grp.orders)
    if any(d != ell for d in grp.orders):
        raise InternalInconsistency("discriminant group is not elementary abelian")
    iso = [u for u in projective_points(dim, ell) if grp.qbar(u) == 0]
    nbrs = [neighbor_lattice(L, grp, u) for u in iso]
    for M in nbrs:
        if M.level != ell:
            raise InternalInconsistency(f"neighbour lattice has level {M.level}, not {ell}")

    def theta_mod(M):
        return reduce_mod(theta_series(M, N, reduce=True), ell)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(theta_mod, nbrs))
    else:
        parts = [theta_mod(M) for M in nbrs]
    total = FpSeries(ell, [0] * (N + 1))
    for s in parts:
        total = total + s
    total = total - theta_mod(L) * (len(iso) - 1)
    lines = (ell ** dim - 1) // (ell - 1)
    report = NeighborReport(ell, lines, len(iso), tuple(sorted({M.level for M in nbrs})), total)
    return total, report


def e6_reduced(ell: int, N: int) -> FpSeries:
    return reduce_mod(_eisenstein_series(6, N), ell)
