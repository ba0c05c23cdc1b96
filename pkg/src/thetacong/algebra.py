"""Exact integer and rational linear algebra.

Matrices are plain nested tuples of Python ``int`` or ``Fraction``;
``as_int_matrix`` / ``as_rat_matrix`` normalise any nested sequence
(lists, numpy arrays) into that form.  All pivoting is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

from .exceptions import PreconditionError, SingularMatrixError

IntMatrix = tuple[tuple[int, ...], ...]
RatMatrix = tuple[tuple[Fraction, ...], ...]


def _to_int(v) -> int:
    if isinstance(v, bool):
        raise TypeError("boolean entries are not integers")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        if v.denominator != 1:
            raise ValueError(f"non-integral entry {v}")
        return v.numerator
    if hasattr(v, "is_integer") and hasattr(v, "__int__"):
        # numpy scalars and floats holding integral values
        if not float(v).is_integer():
            raise ValueError(f"non-integral entry {v!r}")
        return int(v)
    return int(v)


def as_int_matrix(m) -> IntMatrix:
    rows = tuple(tuple(_to_int(v) for v in row) for row in m)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def as_rat_matrix(m) -> RatMatrix:
    rows = tuple(tuple(Fraction(v) for v in row) for row in m)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def shape(m) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> IntMatrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m):
    if not m:
        return ()
    return tuple(zip(*m))


def matmul(a, b):
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ValueError(f"shape mismatch {ra}x{ca} @ {rb}x{cb}")
    bt = transpose(b)
    if not bt:
        return tuple(() for _ in range(ra))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def congruence(g, b):
    """Return ``bᵀ g b`` (Gram matrix of the columns of ``b``)."""
    return matmul(transpose(b), matmul(g, b))


def block_diagonal(*blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return tuple(tuple(r) for r in out)


def is_symmetric(m) -> bool:
    n = len(m)
    return all(len(m[i]) == n for i in range(n)) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i)
    )


def determinant(m) -> int | Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    if any(isinstance(v, Fraction) and v.denominator != 1 for row in m for v in row):
        return _rat_det(m)
    a = [list(map(int, row)) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _rat_det(m) -> Fraction:
    a = [[Fraction(v) for v in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def leading_minors(m) -> list:
    """Leading principal minors of ``m`` (exact)."""
    return [determinant(tuple(row[:k] for row in m[:k])) for k in range(1, len(m) + 1)]


def rational_inverse(m) -> RatMatrix:
    """Exact inverse over the rationals.  Raises on singular input."""
    n, c = shape(m)
    if n != c:
        raise ValueError("matrix must be square")
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        a[k] = [v / piv for v in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return tuple(tuple(row[n:]) for row in a)


def denominator_lcm(values: Iterable) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // gcd(out, d)
    return out


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v) if v else out
    return out


# --------------------------------------------------------------------------
# Smith normal form


def smith_decomposition(m):
    """Return ``(D, U, V)`` with ``U·m·V = D`` diagonal in Smith form.

    ``U`` and ``V`` are unimodular.  Works for rectangular input; the
    diagonal entries are non-negative and successively divide each other.
    """
    rows, cols = shape(m)
    a = [list(map(int, r)) for r in m]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        # row dst += f * row src
        if f:
            a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        if f:
            for row in a:
                row[dst] += f * row[src]
            for row in v:
                row[dst] += f * row[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero |entry| in the remaining block, first in
        # row-major order on ties
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    if a[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block by the pivot
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            best = None
            for i in range(t, rows):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, t)
            for j in range(t, cols):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    freeze = lambda x: tuple(tuple(r) for r in x)
    return freeze(a), freeze(u), freeze(v)


def smith_normal_form(m) -> tuple[int, ...]:
    """Elementary divisors ``d_1 | d_2 | ... | d_r`` of a nonsingular square matrix."""
    n, c = shape(m)
    if n != c:
        raise ValueError("matrix must be square")
    d, _, _ = smith_decomposition(m)
    divs = tuple(d[i][i] for i in range(n))
    if any(x == 0 for x in divs):
        raise SingularMatrixError("matrix is singular")
    return divs


def invariant_factors(m) -> tuple[int, ...]:
    """Diagonal of the Smith form of an arbitrary (rectangular) integer matrix."""
    d, _, _ = smith_decomposition(m)
    return tuple(d[i][i] for i in range(min(shape(m))))


# --------------------------------------------------------------------------
# Hermite form, kernels, bases


def column_echelon(m):
    """Return ``(H, V)`` with ``m·V = H`` column echelon form, ``V`` unimodular.

    Zero columns of ``H`` are moved to the right; the matching columns of
    ``V`` span the integer kernel of ``m`` and are saturated.
    """
    rows, cols = shape(m)
    a = [list(map(int, r)) for r in m]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def col_op(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    piv = 0
    for r in range(rows):
        if piv >= cols:
            break
        # gcd-reduce row r over columns piv..cols-1 into column piv
        while True:
            nz = [j for j in range(piv, cols) if a[r][j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(a[r][j]), j))
            if j0 != piv:
                col_swap(piv, j0)
            others = [j for j in range(piv + 1, cols) if a[r][j]]
            if not others:
                break
            for j in others:
                col_op(j, piv, -(a[r][j] // a[r][piv]))
        if a[r][piv]:
            if a[r][piv] < 0:
                for row in a:
                    row[piv] = -row[piv]
                for row in v:
                    row[piv] = -row[piv]
            # reduce earlier pivot columns' entries in this row
            for j in range(piv):
                if a[r][j]:
                    col_op(j, piv, -(a[r][j] // a[r][piv]))
            piv += 1
    freeze = lambda x: tuple(tuple(rr) for rr in x)
    return freeze(a), freeze(v), piv


def integer_kernel(m) -> IntMatrix:
    """Basis (as columns) of the saturated kernel ``{x ∈ ℤⁿ : m x = 0}``.

    Accepts rational matrices; rows are cleared of denominators first.
    The result has ``n`` rows and ``n - rank`` columns.
    """
    rows, cols = shape(m)
    if rows == 0:
        return identity(cols)
    scaled = []
    for row in m:
        den = denominator_lcm(row)
        scaled.append(tuple(int(Fraction(x) * den) for x in row))
    _, v, rank = column_echelon(tuple(scaled))
    return tuple(tuple(r[rank:]) for r in v)


def hermite_basis(generators) -> IntMatrix:
    """Column basis of the ℤ-span of the given integer column generators."""
    h, _, rank = column_echelon(generators)
    return tuple(tuple(r[:rank]) for r in h)


def rational_span_basis(columns):
    """ℤ-basis (columns, rational) of the lattice spanned by rational column vectors."""
    cols = transpose(columns)
    den = denominator_lcm(x for c in cols for x in c)
    scaled = tuple(tuple(int(Fraction(x) * den) for x in row) for row in columns)
    h = hermite_basis(scaled)
    return tuple(tuple(Fraction(x, den) for x in row) for row in h)


def complete_to_basis(vec: Sequence[int]) -> IntMatrix:
    """Unimodular matrix whose first column is the primitive vector ``vec``."""
    n = len(vec)
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g != 1:
        raise ValueError("vector is not primitive")
    # V unimodular with (vecᵀ) V = (1, 0, ..., 0); then W = V⁻¹ has first row
    # ... we need a matrix with first column vec, i.e. inverse-transpose.
    h, v, _ = column_echelon((tuple(vec),))
    # vecᵀ·v = e_1ᵀ  =>  vᵀ·vec = e_1  =>  (vᵀ)⁻¹ e_1 = vec
    w = rational_inverse(transpose(v))
    out = as_int_matrix(w)
    assert tuple(r[0] for r in out) == tuple(vec)
    return out


# --------------------------------------------------------------------------
# Mod-p linear algebra


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    r = isqrt(p)
    f = 3
    while f <= r:
        if p % f == 0:
            return False
        f += 2
    return True


def solve_mod_p(a, b, p: int) -> Optional[tuple[int, ...]]:
    """One solution of ``a x ≡ b (mod p)``, or ``None`` if inconsistent.

    Gaussian elimination with first-nonzero pivoting; free variables are 0.
    """
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    rows, cols = shape(a)
    if len(b) != rows:
        raise ValueError("right-hand side has wrong length")
    m = [[x % p for x in row] + [b[i] % p] for i, row in enumerate(a)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if m[i][cols] % p:
            return None
    x = [0] * cols
    for i, c in enumerate(pivots):
        x[c] = m[i][cols]
    return tuple(x)


# --------------------------------------------------------------------------
# Gram-matrix LLL (basis preprocessing for enumeration)


def lll_gram(g, delta: Fraction = Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix.

    Returns ``(G', T)`` with ``G' = Tᵀ G T`` and ``T`` unimodular.  Exact
    rational arithmetic; intended for ranks up to a few dozen.
    """
    n = len(g)
    gm = [list(map(int, r)) for r in g]
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    if n <= 1:
        return as_int_matrix(gm), as_int_matrix(t)

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Fraction(gm[i][j])
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bstar[k]
                mu[i][j] = s / bstar[j]
            s = Fraction(gm[i][i])
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * bstar[k]
            bstar[i] = s
        return mu, bstar

    def sub(i, j, q):
        # b_i -= q b_j
        for r in range(n):
            t[r][i] -= q * t[r][j]
        gii = gm[i][i] - 2 * q * gm[i][j] + q * q * gm[j][j]
        for r in range(n):
            gm[i][r] -= q * gm[j][r]
        for r in range(n):
            gm[r][i] = gm[i][r]
        gm[i][i] = gii

    def swap(i, j):
        for r in range(n):
            t[r][i], t[r][j] = t[r][j], t[r][i]
        gm[i], gm[j] = gm[j], gm[i]
        for r in range(n):
            gm[r][i], gm[r][j] = gm[r][j], gm[r][i]

    k = 1
    mu, bstar = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                sub(k, j, q)
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            mu, bstar = gso()
            k = max(k - 1, 1)
    return as_int_matrix(gm), as_int_matrix(t)
