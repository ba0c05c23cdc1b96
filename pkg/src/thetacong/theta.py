"""Representation numbers and theta series by lattice point enumeration.

The counting kernel is a Fincke-Pohst enumeration compiled with numba.
Its interval bounds come from the exact rational Cholesky factor, rounded
to doubles and widened by a safety margin, so the bounds can only
over-approximate the search region; every candidate leaf is then accepted
or rejected by an exact integer norm.  Vectors are counted up to sign
(the last nonzero coordinate is positive), which halves the work.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import isqrt
from typing import Iterator, Optional, Sequence

import numba
import numpy as np

from . import algebra as alg
from .exceptions import BudgetExceeded, PreconditionError
from .lattice import DiscriminantGroup, Lattice, discriminant_group
from .qseries import QSeries

DEFAULT_BUDGET = 10**9
_INT64_SAFE = 2**62


class ThetaSeries(QSeries):
    """Theta series ``sum_n r_L(n) q^n`` of a lattice, exact to ``precision``."""

    __slots__ = ("lattice",)

    def __init__(self, coeffs, lattice: Lattice | None = None):
        super().__init__(coeffs)
        self.lattice = lattice


class CosetThetaSeries(QSeries):
    """Counts of ``x`` in ``rho + L`` by ``½ b(x, x)`` for an isotropic coset ``rho``."""

    __slots__ = ("lattice", "coset")

    def __init__(self, coeffs, lattice: Lattice | None = None, coset=None):
        super().__init__(coeffs)
        self.lattice = lattice
        self.coset = coset


# --------------------------------------------------------------------------
# exact Cholesky


def rational_cholesky(gram):
    """Return ``(diag, mu)`` with ``Q(x) = sum_i diag[i] (x_i + sum_{j>i} mu[i][j] x_j)²``.

    Exact over the rationals; ``gram`` must be positive definite.
    """
    n = len(gram)
    a = [[Fraction(v) for v in row] for row in gram]
    diag = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        s = a[i][i] - sum(diag[k] * mu[k][i] ** 2 for k in range(i))
        if s <= 0:
            raise PreconditionError("Gram matrix is not positive definite")
        diag[i] = s
        for j in range(i + 1, n):
            t = a[i][j] - sum(diag[k] * mu[k][i] * mu[k][j] for k in range(i))
            mu[i][j] = t / s
    return diag, mu


def estimate_count(L: Lattice, N: int) -> float:
    """Gaussian-heuristic estimate of the number of vectors with ``½ b(x,x) <= N``."""
    n = L.rank
    if n == 0:
        return 1.0
    r = math.sqrt(2 * N + 1)
    log_vol = (n / 2) * math.log(math.pi) - math.lgamma(n / 2 + 1) + n * math.log(r)
    return math.exp(log_vol - 0.5 * math.log(L.det))


# --------------------------------------------------------------------------
# numba kernel


@numba.njit(cache=True, nogil=True)
def _count_kernel(qd, mu, g, bound, top_lo, top_hi, counts):  # pragma: no cover - compiled
    n = qd.shape[0]
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    center = np.zeros(n)
    rem = np.zeros(n + 1)
    pnorm = np.zeros(n + 1, dtype=np.int64)
    hvec = np.zeros(n, dtype=np.int64)
    allzero = np.zeros(n + 1, dtype=np.bool_)
    fbound = float(bound)
    eps = 1e-9 * (fbound + 1.0)
    rem[n] = fbound
    allzero[n] = True
    i = n - 1
    # enter top level
    x[i] = top_lo
    hi[i] = top_hi
    center[i] = 0.0
    if x[i] > hi[i]:
        return
    for k in range(i):
        hvec[k] = g[k, i] * x[i]
    while True:
        # x[i] is a fresh value at level i; hvec[k] (k < i) includes x[i]
        xi = x[i]
        pnorm[i] = pnorm[i + 1] + g[i, i] * xi * xi + 2 * xi * hvec[i]
        if i == 0:
            if not (allzero[1] and xi == 0):
                nv = pnorm[0]
                if nv <= bound:
                    counts[nv >> 1] += 1
            descend = False
        else:
            t = xi + center[i]
            rem[i] = rem[i + 1] - qd[i] * t * t
            descend = rem[i] > -eps
        if descend:
            allzero[i] = allzero[i + 1] and xi == 0
            j = i - 1
            c = 0.0
            for k in range(i, n):
                c += mu[j, k] * x[k]
            center[j] = c
            r = math.sqrt(max(rem[i] + eps, 0.0) / qd[j]) + 1e-9
            lo = math.ceil(-c - r)
            up = math.floor(-c + r)
            if allzero[i] and lo < 0:
                lo = 0
            if lo <= up:
                x[j] = lo
                hi[j] = up
                for k in range(j):
                    hvec[k] += g[k, j] * lo
                i = j
                continue
        # advance at level i, backtracking as needed
        while True:
            if x[i] < hi[i]:
                x[i] += 1
                for k in range(i):
                    hvec[k] += g[k, i]
                break
            for k in range(i):
                hvec[k] -= g[k, i] * x[i]
            i += 1
            if i == n:
                return


def _kernel_inputs(gram):
    diag, mu = rational_cholesky(gram)
    n = len(gram)
    qd = np.array([float(d) for d in diag])
    mu_f = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mu_f[i, j] = float(mu[i][j])
    g = np.array(gram, dtype=np.int64).reshape(n, n)
    return qd, mu_f, g


def _top_range(qd, bound) -> int:
    n = len(qd)
    return int(math.floor(math.sqrt((bound + 1e-9 * (bound + 1)) / qd[n - 1]) + 1e-9))


def _chunks(top: int, workers: int) -> list[tuple[int, int]]:
    vals = list(range(top + 1))
    if workers <= 1 or len(vals) <= 1:
        return [(0, top)]
    # x_top = 0 carries the largest subtree; give every value its own task
    return [(v, v) for v in vals]


def _python_safe(gram, N) -> bool:
    # int64 headroom for exact norms and partial inner products
    n = len(gram)
    m = max((abs(v) for r in gram for v in r), default=0)
    return m * n * (2 * N + 1) * 64 < _INT64_SAFE


def half_counts(gram, N: int, n_jobs: int = 1) -> list[int]:
    """Number of nonzero vectors with ``b(x,x) = 2n`` up to sign, ``n = 0..N``."""
    n = len(gram)
    counts = np.zeros(N + 1, dtype=np.int64)
    if n == 0 or N == 0:
        return [0] * (N + 1)
    if not _python_safe(gram, N):
        return _half_counts_exact(gram, N)
    qd, mu, g = _kernel_inputs(gram)
    bound = 2 * N
    top = _top_range(qd, bound)
    tasks = _chunks(top, n_jobs)
    if len(tasks) == 1:
        _count_kernel(qd, mu, g, bound, tasks[0][0], tasks[0][1], counts)
        return [int(c) for c in counts]

    def run(task):
        part = np.zeros(N + 1, dtype=np.int64)
        _count_kernel(qd, mu, g, bound, task[0], task[1], part)
        return part

    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        parts = list(pool.map(run, tasks))
    for p in parts:
        counts += p
    return [int(c) for c in counts]


def _half_counts_exact(gram, N: int) -> list[int]:
    out = [0] * (N + 1)
    for v, nv in enumerate_vectors(gram, 2 * N, up_to_sign=True):
        out[int(nv) // 2] += 1
    return out


def theta_series(L: Lattice, N: int, n_jobs: int = 1, budget: float = DEFAULT_BUDGET,
                 override_budget: bool = False, reduce: bool = False) -> ThetaSeries:
    """Exact theta series ``r_L(0) + r_L(1) q + ... + r_L(N) q^N``.

    ``reduce=True`` LLL-reduces the basis first, which leaves the counts
    unchanged but can shorten the enumeration considerably.
    """
    if N < 0:
        raise ValueError("precision must be non-negative")
    if not override_budget and estimate_count(L, N) > budget:
        raise BudgetExceeded(
            f"estimated {estimate_count(L, N):.3g} vectors exceeds budget {budget:.3g}")
    gram = L.gram
    if reduce and L.rank > 1:
        gram, _ = alg.lll_gram(gram)
    half = half_counts(gram, N, n_jobs)
    coeffs = [1] + [2 * c for c in half[1:]]
    return ThetaSeries(coeffs, L)


# --------------------------------------------------------------------------
# exact pure-Python enumeration


def _floor_add_sqrt(a: Fraction, t: Fraction) -> int:
    """``floor(a + sqrt(t))`` for rationals ``a`` and ``t >= 0``."""
    k = math.floor(float(a) + math.sqrt(float(t))) + 1
    while k > a and (k - a) ** 2 > t:
        k -= 1
    while (k + 1) <= a or (k + 1 - a) ** 2 <= t:
        k += 1
    return k


def _ceil_sub_sqrt(a: Fraction, t: Fraction) -> int:
    """``ceil(a - sqrt(t))``."""
    return -_floor_add_sqrt(-a, t)


def enumerate_vectors(gram, bound, shift: Optional[Sequence] = None,
                      up_to_sign: bool = False) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Yield ``(v, Q(v + shift))`` for integer ``v`` with ``Q(v + shift) <= bound``.

    ``Q(y) = yᵀ G y``; ``gram`` may be rational.  Exact arithmetic
    throughout.  With ``up_to_sign`` (only for ``shift=None``) the zero
    vector is skipped and one of each ``±v`` is produced.
    """
    n = len(gram)
    bound = Fraction(bound)
    if n == 0:
        if bound >= 0 and not up_to_sign:
            yield (), Fraction(0)
        return
    if shift is not None and up_to_sign:
        raise ValueError("sign symmetry needs an unshifted lattice")
    diag, mu = rational_cholesky(gram)
    s = [Fraction(v) for v in shift] if shift is not None else [Fraction(0)] * n
    x = [0] * n

    def rec(i, rem, allzero):
        c = s[i] + sum((mu[i][j] * (x[j] + s[j]) for j in range(i + 1, n)), Fraction(0))
        t = rem / diag[i]
        lo = _ceil_sub_sqrt(-c, t)
        hi = _floor_add_sqrt(-c, t)
        if up_to_sign and allzero:
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            x[i] = xi
            r = rem - diag[i] * (xi + c) ** 2
            if r < 0:
                continue
            if i == 0:
                if up_to_sign and allzero and xi == 0:
                    continue
                yield tuple(x), bound - r
            else:
                yield from rec(i - 1, r, allzero and xi == 0)
        x[i] = 0

    yield from rec(n - 1, bound, True)


def short_vectors(gram, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    """Nonzero vectors up to sign with ``vᵀ G v <= bound``, sorted by norm then coordinates."""
    out = list(enumerate_vectors(gram, bound, up_to_sign=True))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def brute_force_counts(L: Lattice, N: int) -> ThetaSeries:
    """Independent oracle: exhaustive box search, rank at most 6."""
    if L.rank > 6:
        raise PreconditionError("brute force search is limited to rank <= 6")
    n = L.rank
    if n == 0:
        return ThetaSeries([1] + [0] * N, L)
    # x_i² det <= 2N adj_ii, from max x_i² on the ellipsoid = 2N (G⁻¹)_ii
    inv = L.inverse_gram()
    bounds = []
    for i in range(n):
        adj_ii = inv[i][i] * L.det
        bounds.append(isqrt(int(2 * N * adj_ii) // L.det))
    g = L.gram
    counts = [0] * (N + 1)
    for v in itertools.product(*(range(-b, b + 1) for b in bounds)):
        nv = sum(v[i] * g[i][j] * v[j] for i in range(n) for j in range(n))
        if nv <= 2 * N:
            counts[nv // 2] += 1
    return ThetaSeries(counts, L)


def coset_theta(L: Lattice, rho, N: int, group: DiscriminantGroup | None = None
                ) -> CosetThetaSeries:
    """Counts of ``x ∈ rho + L`` with ``½ b(x,x) = n`` for an isotropic coset ``rho``."""
    grp = group if group is not None else discriminant_group(L)
    rho = tuple(rho)
    if grp.qbar(rho) != 0:
        raise PreconditionError(
            f"coset {rho} is not isotropic (qbar = {grp.qbar(rho)}); "
            "fractional exponents are not supported")
    shift = grp.vector(rho)
    counts = [0] * (N + 1)
    for _, nv in enumerate_vectors(L.gram, 2 * N, shift=shift):
        if nv.denominator != 1 or nv.numerator % 2:
            raise PreconditionError("coset norm is not an even integer")
        counts[nv.numerator // 2] += 1
    return CosetThetaSeries(counts, L, rho)
