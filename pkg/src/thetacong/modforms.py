"""Level-one modular forms as exact q-expansions.

Forms are stored in the monomial basis ``E4^a E6^e Δ^b`` with
``4a + 6e + 12b = k`` and ``e ∈ {0, 1}`` (``e = 1`` exactly when
``k ≡ 2 mod 4``), ordered by increasing ``b``.  Since ``Δ = q + O(q²)``
the monomial with exponent ``b`` starts at ``q^b``, so the basis is
unitriangular against the first ``dim M_k`` coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from . import algebra as alg
from .exceptions import InternalInconsistency, PreconditionError
from .qseries import QSeries

Monomial = tuple[int, int, int]  # (a, e, b): E4^a E6^e Δ^b


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number ``B_k`` (``B_1 = -1/2`` convention), exact."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k % 2 and k != 1:
        raise ValueError(f"B_{k} requested for odd k")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    # sum_{j<=k} C(k+1, j) B_j = 0
    s = sum((comb(k + 1, j) * bernoulli(j) for j in range(k) if j < 2 or j % 2 == 0),
            Fraction(0))
    return -s / (k + 1)


def divisor_sums(power: int, N: int) -> list[int]:
    """``sigma_power(n)`` for ``n = 0..N`` (with ``sigma(0) = 0``)."""
    out = [0] * (N + 1)
    for d in range(1, N + 1):
        dp = d ** power
        for m in range(d, N + 1, d):
            out[m] += dp
    return out


def dim_Mk(k: int) -> int:
    if k < 0 or k % 2:
        raise PreconditionError(f"weight {k} must be even and non-negative")
    return k // 12 if k % 12 == 2 else k // 12 + 1


def sturm_bound(k: int) -> int:
    return k // 12 + 1


@dataclass(frozen=True)
class ModularForm:
    """Level-one form: weight, coordinates in the monomial basis, expansion."""

    weight: int
    monomials: tuple[Monomial, ...]
    coords: tuple
    expansion: QSeries

    @property
    def precision(self) -> int:
        return self.expansion.precision

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coords)

    def describe(self) -> str:
        """Polynomial in E4, E6, Δ, e.g. ``E4^3 - 720*Δ``."""
        parts = []
        for (a, e, b), c in zip(self.monomials, self.coords):
            if c == 0:
                continue
            factors = [f for f in (_pw("E4", a), _pw("E6", e), _pw("Δ", b)) if f]
            mono = "*".join(factors) or "1"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}" if factors else f"{c}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s or "0"


def _pw(name, e):
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{e}"


def _eisenstein_series(k: int, N: int) -> QSeries:
    factor = Fraction(-2 * k) / bernoulli(k)
    sig = divisor_sums(k - 1, N)
    return QSeries([1] + [factor * s for s in sig[1:]], N)


def eisenstein(k: int, N: int) -> ModularForm:
    """``E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`` with its basis coordinates."""
    if k < 4 or k % 2:
        raise PreconditionError("Eisenstein series need even k >= 4")
    expansion = _eisenstein_series(k, N)
    monos = monomial_basis(k)
    coords = _solve_coords(monos, expansion, N)
    return ModularForm(k, monos, coords, expansion)


def delta_product(N: int) -> QSeries:
    """``q * prod (1 - q^n)^24`` to precision ``N``."""
    prod = [0] * (N + 1)
    prod[0] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            for m in range(N, n - 1, -1):
                prod[m] -= prod[m - n]
    return QSeries([0] + prod[:N], N)


def delta(N: int) -> ModularForm:
    """``Δ`` from the product formula, checked against ``(E4³ - E6²)/1728``."""
    prod = delta_product(N)
    e4 = _eisenstein_series(4, N)
    e6 = _eisenstein_series(6, N)
    quotient = (e4 ** 3 - e6 * e6) / 1728
    if quotient != prod:
        raise InternalInconsistency("product formula for Δ disagrees with (E4³ - E6²)/1728")
    return ModularForm(12, ((3, 0, 0), (0, 0, 1)), (0, 1), prod)


def monomial_basis(k: int) -> tuple[Monomial, ...]:
    """Exponent triples of the monomial basis of weight ``k``, by increasing Δ-power."""
    dim = dim_Mk(k)
    e = 1 if k % 4 == 2 else 0
    out = []
    for b in range(dim):
        rest = k - 6 * e - 12 * b
        if rest < 0 or rest % 4:
            raise InternalInconsistency(f"no monomial for weight {k}, Δ-power {b}")
        out.append((rest // 4, e, b))
    return tuple(out)


_EXPANSION_CACHE: dict[tuple[Monomial, int], QSeries] = {}


def monomial_expansion(m: Monomial, N: int) -> QSeries:
    key = (m, N)
    if key not in _EXPANSION_CACHE:
        a, e, b = m
        e4 = _eisenstein_series(4, N)
        e6 = _eisenstein_series(6, N)
        s = (e4 ** a) * (e6 ** e) * (delta_product(N) ** b)
        _EXPANSION_CACHE[key] = s
    return _EXPANSION_CACHE[key]


def basis_Mk(k: int, N: int) -> list[ModularForm]:
    """Monomial basis of ``M_k``; element ``b`` has leading term ``q^b``."""
    monos = monomial_basis(k)
    out = []
    for idx, m in enumerate(monos):
        coords = tuple(int(i == idx) for i in range(len(monos)))
        out.append(ModularForm(k, monos, coords, monomial_expansion(m, N)))
    return out


def form_from_coords(k: int, coords: Sequence, N: int) -> ModularForm:
    monos = monomial_basis(k)
    if len(coords) != len(monos):
        raise ValueError(f"weight {k} needs {len(monos)} coordinates")
    s = QSeries([0], N)
    for m, c in zip(monos, coords):
        if c:
            s = s + monomial_expansion(m, N) * c
    return ModularForm(k, monos, tuple(coords), s)


def _solve_coords(monos, target: QSeries, N: int) -> tuple:
    # unitriangular: coefficient b of monomial b is 1, lower ones vanish
    dim = len(monos)
    if N + 1 < dim:
        raise PreconditionError(f"precision {N} too small for {dim} basis forms")
    exps = [monomial_expansion(m, N) for m in monos]
    mat = tuple(tuple(exps[j][i] for j in range(dim)) for i in range(dim))
    inv = alg.rational_inverse(mat)
    coords = alg.matvec(inv, [Fraction(target[i]) for i in range(dim)])
    return tuple(c.numerator if c.denominator == 1 else c for c in coords)


def extremal_form(k: int, N: int) -> ModularForm:
    """The form ``1 + O(q^{dim M_k})`` of weight ``k``, solved over the rationals."""
    dim = dim_Mk(k)
    if dim == 0:
        raise PreconditionError(f"M_{k} is zero")
    monos = monomial_basis(k)
    target = QSeries([1] + [0] * (dim - 1))
    coords = _solve_coords(monos, target, max(N, dim - 1))
    f = form_from_coords(k, coords, N)
    if any(f.expansion[i] != (1 if i == 0 else 0) for i in range(min(dim, N + 1))):
        raise InternalInconsistency("extremal form does not start 1 + O(q^dim)")
    return f


# --------------------------------------------------------------------------
# reduction mod ℓ


class FpSeries:
    """Truncated power series over ``F_p``, coefficients in ``[0, p)``."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        self.p = p
        self.coeffs = tuple(int(c) % p for c in coeffs)

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FpSeries):
            return self.p == other.p and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"FpSeries({self.p}, {list(self.coeffs)})"

    def __add__(self, other):
        if not isinstance(other, FpSeries) or other.p != self.p:
            return NotImplemented
        n = min(len(self), len(other))
        return FpSeries(self.p, [a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])])

    def __sub__(self, other):
        if not isinstance(other, FpSeries) or other.p != self.p:
            return NotImplemented
        n = min(len(self), len(other))
        return FpSeries(self.p, [a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])])

    def __mul__(self, other):
        if isinstance(other, int):
            return FpSeries(self.p, [c * other for c in self.coeffs])
        if not isinstance(other, FpSeries) or other.p != self.p:
            return NotImplemented
        n = min(len(self), len(other))
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a:
                for j in range(n - i):
                    out[i + j] += a * other.coeffs[j]
        return FpSeries(self.p, out)

    __rmul__ = __mul__

    def truncate(self, precision: int) -> "FpSeries":
        return FpSeries(self.p, self.coeffs[: precision + 1])

    def lift(self) -> QSeries:
        return QSeries(self.coeffs)


def reduce_mod(f, p: int) -> FpSeries:
    """Reduce a series (or the expansion of a form) coefficientwise mod ``p``."""
    if not alg.is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    s = f.expansion if isinstance(f, ModularForm) else f
    out = []
    for n, c in enumerate(s):
        c = Fraction(c)
        if c.denominator % p == 0:
            raise PreconditionError(f"coefficient of q^{n} is not {p}-integral: {c}")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return FpSeries(p, out)
