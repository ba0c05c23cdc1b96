"""Dense truncated power series in ``q`` with exact coefficients."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Coeff = Union[int, Fraction]


def _norm(c) -> Coeff:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _norm(Fraction(c))
    return int(c)


class QSeries:
    """Power series ``c_0 + c_1 q + ... + c_N q^N + O(q^{N+1})``.

    Arithmetic between two series truncates to the smaller precision.
    Integral ``Fraction`` coefficients are stored as ``int`` so that
    equality and printing do not depend on how a coefficient was reached.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, precision: int | None = None):
        cs = [_norm(c) for c in coeffs]
        if precision is not None:
            if precision < 0:
                raise ValueError("precision must be non-negative")
            cs = cs[: precision + 1] + [0] * (precision + 1 - len(cs))
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs: tuple[Coeff, ...] = tuple(cs)

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, precision: int) -> "QSeries":
        return cls([1], precision)

    @classmethod
    def monomial(cls, n: int, precision: int, c: Coeff = 1) -> "QSeries":
        cs = [0] * (precision + 1)
        if n <= precision:
            cs[n] = c
        return cls(cs)

    def truncate(self, precision: int) -> "QSeries":
        if precision > self.precision:
            raise ValueError(f"cannot extend precision {self.precision} to {precision}")
        return QSeries(self.coeffs[: precision + 1])

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, QSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"QSeries({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if n == 0 else ("q" if n == 1 else f"q^{n}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' if mono else ''}{mono}")
        body = " + ".join(terms).replace("+ -", "- ") or "0"
        return f"{body} + O(q^{self.precision + 1})"

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def _coerce(self, other):
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries([other], self.precision)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.precision, o.precision) + 1
        return QSeries([a + b for a, b in zip(self.coeffs[:n], o.coeffs[:n])])

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([c * other for c in self.coeffs])
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.precision, other.precision)
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([Fraction(c) / other for c in self.coeffs])
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = QSeries.one(self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, ``None`` for the zero series."""
        return next((i for i, c in enumerate(self.coeffs) if c != 0), None)
