"""Property checks over random inputs."""

import math
import random
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from sympy import primefactors

from thetacong import algebra as alg
from thetacong.automorphism import (
    check_fixed_congruence,
    fixed_lattice,
    index_report,
    make_automorphism,
)
from thetacong.lattice import (
    BinaryForm,
    direct_sum,
    discriminant_group,
    is_power_of,
    make_lattice,
    transform,
)
from thetacong.lifting import hat_lattice, represent_admissible
from thetacong.modforms import reduce_mod
from thetacong.qseries import QSeries
from thetacong.theta import theta_series

from helpers import F_GRAM, L112, random_even_lattice, random_level_ell_lattice, random_unimodular

SETTINGS = settings(max_examples=25, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small = st.integers(min_value=-6, max_value=6)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@SETTINGS
@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n)))
def test_snf_divisibility_and_product(m):
    d = alg.smith_normal_form(m) if alg.determinant(m) else None
    if d is None:
        return
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert math.prod(d) == abs(alg.determinant(m))


@SETTINGS
@given(st.integers(1, 3).flatmap(lambda r: st.integers(r, 5).flatmap(lambda c: matrices(r, c))))
def test_integer_kernel_annihilated_and_saturated(m):
    k = alg.integer_kernel(m)
    cols = len(k[0]) if k and k[0] else 0
    if cols == 0:
        return
    assert all(v == 0 for r in alg.matmul(m, k) for v in r)
    assert all(f == 1 for f in alg.invariant_factors(k))


series = st.lists(st.integers(-50, 50), min_size=6, max_size=6).map(QSeries)


@SETTINGS
@given(series, series, series)
def test_qseries_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == QSeries([0] * 6)


@SETTINGS
@given(series, st.sampled_from([5, 7, 11]))
def test_reduce_mod_idempotent(s, p):
    r = reduce_mod(s, p)
    assert reduce_mod(r.lift(), p) == r


@SETTINGS
@given(seeds, st.integers(1, 4))
def test_lattice_invariants(seed, rank):
    L = random_even_lattice(random.Random(seed), rank)
    assert L.det == math.prod(L.elementary_divisors)
    assert (2 * L.det) % L.level == 0
    assert set(primefactors(L.level)) - {2} == set(primefactors(L.det)) - {2}


@SETTINGS
@given(seeds)
def test_theta_basis_invariance(seed):
    rng = random.Random(seed)
    L = random_even_lattice(rng, rng.randint(1, 4))
    u = random_unimodular(rng, L.rank)
    assert theta_series(transform(L, u), 8) == theta_series(L, 8)


@SETTINGS
@given(seeds)
def test_theta_multiplicative(seed):
    rng = random.Random(seed)
    L, M = random_even_lattice(rng, 2), random_even_lattice(rng, 2)
    assert theta_series(direct_sum(L, M), 8) == theta_series(L, 8) * theta_series(M, 8)


@SETTINGS
@given(seeds, st.integers(2, 4))
def test_parallel_equals_serial(seed, jobs):
    L = random_even_lattice(random.Random(seed), 4)
    assert theta_series(L, 10, n_jobs=jobs) == theta_series(L, 10)


@SETTINGS
@given(seeds)
def test_qbar_well_defined(seed):
    rng = random.Random(seed)
    L = random_even_lattice(rng, 3)
    g = discriminant_group(L)
    c = tuple(rng.randrange(d) for d in g.orders)
    y = g.vector(c)
    shift = [rng.randint(-3, 3) for _ in range(L.rank)]
    z = [a + b for a, b in zip(y, shift)]
    half = sum(z[i] * L.gram[i][j] * z[j] for i in range(L.rank) for j in range(L.rank)) / 2
    assert (half - g.qbar(c)).denominator == 1
    assert g.reduce(z) == c


@SETTINGS
@given(st.integers(1, 30), st.integers(-30, 30), st.integers(1, 30),
       st.sampled_from([5, 7, 11, 13]))
def test_represent_admissible_recomposes(a, b, c, ell):
    if 4 * a * c - b * b <= 0 or math.gcd(math.gcd(a, b), c) != 1:
        return
    Q = BinaryForm(a, b, c)
    r = represent_admissible(Q, ell)
    assert math.prod(p ** e for p, e in r.factorization.items()) == Q(r.x, r.y) == r.value
    assert all(p != ell and p % ell != ell - 1 for p in r.factorization)


# constructed ell-power automorphisms

LIFTS = {}


def _lift(name):
    if name not in LIFTS:
        gram, ell = {"112": (L112, 7), "F": (F_GRAM, 5)}[name]
        LIFTS[name] = (hat_lattice(make_lattice(gram), ell), ell)
    return LIFTS[name]


@settings(max_examples=6, deadline=None)
@given(st.sampled_from(["112", "F"]), seeds)
def test_orbit_congruence_for_conjugated_sigma(name, seed):
    lift, ell = _lift(name)
    rng = random.Random(seed)
    hat = lift.hat_lattice
    v = random_unimodular(rng, hat.rank, steps=8, size=1)
    vinv = alg.as_int_matrix(alg.rational_inverse(v))
    moved = transform(hat, v)
    sigma = make_automorphism(moved, alg.matmul(vinv, alg.matmul(lift.sigma.matrix, v)))
    assert sigma.order == lift.sigma.order
    assert check_fixed_congruence(moved, sigma, ell, 8)
    fixed, _ = fixed_lattice(moved, sigma)
    assert (moved.rank - fixed.rank) % (ell - 1) == 0
    rep = index_report(moved, sigma, ell)
    assert is_power_of(rep.index_in_det_fixed, ell)
    assert is_power_of(rep.index_in_fixed_det, ell)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_lift_round_trip_random_level_seven(seed):
    L = random_level_ell_lattice(random.Random(seed), 7)
    lift = hat_lattice(L, 7)
    assert alg.congruence(lift.hat_lattice.gram, lift.fixed_embedding) == L.gram
    t1, t2 = theta_series(lift.hat_lattice, 10, reduce=True), theta_series(L, 10)
    assert all((a - b) % 7 == 0 for a, b in zip(t1.coeffs, t2.coeffs))
