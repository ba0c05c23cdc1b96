"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is
printed at the end of the run (and immediately with ``-s``)."""

import random
import time
from contextlib import contextmanager

import pytest

from thetacong import algebra as alg
from thetacong.automorphism import (
    check_fixed_congruence,
    fixed_lattice,
    fixed_subgroup_order,
    index_report,
    make_automorphism,
)
from thetacong.congruence import (
    e6_reduced,
    eisenstein_from_neighbors,
    find_congruent_form,
    verify_congruence,
)
from thetacong.fixtures import FIXTURES, load_fixture
from thetacong.lattice import (
    direct_sum,
    discriminant_group,
    is_power_of,
    milgram_residual,
    transform,
    weight_residue,
)
from thetacong.lifting import hat_lattice
from thetacong.modforms import eisenstein, extremal_form, form_from_coords, reduce_mod
from thetacong.qseries import QSeries
from thetacong.theta import brute_force_counts, theta_series

from conftest import ACCEPTANCE_LINES
from helpers import random_even_lattice, random_level_ell_lattice, random_unimodular

KNOWN_CONGRUENCES = [
    ("[1,1,2]", 7, 4, (1,)),
    ("[2,1,3]", 23, 12, (1, -720)),
    ("[2,1,4]", 31, 16, (1, -960)),
    ("[3,1,4]", 47, 24, (1, -1440, 125280)),
    ("[4,3,5]", 71, 36, (1, -2160, 965520, -27302400)),
]

# the level-ell fixtures used wherever a criterion says "all fixtures"
ELL_OF = {"[1,1,2]": 7, "[1,1,3]": 11, "[2,1,3]": 23, "[2,1,4]": 31, "[3,1,4]": 47,
          "[4,3,5]": 71, "F": 5, "E8": 5, "Leech": 7}


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"criterion {number:>2} FAIL  {title} ({type(exc).__name__}: {exc})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"criterion {number:>2} PASS  {title} [{time.perf_counter() - start:.2f} s]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_criterion_01_known_congruences():
    with criterion(1, "five displayed congruences at N=20 in under 5 s"):
        start = time.perf_counter()
        for name, ell, k, coords in KNOWN_CONGRUENCES:
            theta = theta_series(load_fixture(name), 20)
            f = form_from_coords(k, coords, 20)
            ok, bad = verify_congruence(theta, f, ell, 20)
            assert ok, f"{name} mod {ell} fails at q^{bad}"
        elapsed = time.perf_counter() - start
        assert elapsed < 5, f"took {elapsed:.2f} s"


def test_criterion_02_forms_recovered_from_theta():
    with criterion(2, "find_congruent_form recovers the displayed forms"):
        for name, ell, k, coords in KNOWN_CONGRUENCES:
            cert = find_congruent_form(load_fixture(name), ell, 20)
            assert cert.weight == k
            assert cert.reduced == reduce_mod(form_from_coords(k, coords, 20), ell), name


def test_criterion_03_extremal_coordinates():
    with criterion(3, "extremal forms f12, f16, f24, f36 have the displayed coefficients"):
        for k, coords in [(12, (1, -720)), (16, (1, -960)), (24, (1, -1440, 125280)),
                          (36, (1, -2160, 965520, -27302400))]:
            f = extremal_form(k, 20)
            assert f.coords == coords and all(type(c) is int for c in f.coords)


def test_criterion_04_unimodular_thetas():
    with criterion(4, "theta(E8) = E4 to N=20; theta(Leech) = E4^3 - 720Δ to N=2"):
        assert theta_series(load_fixture("E8"), 20) == eisenstein(4, 20).expansion
        leech = theta_series(load_fixture("Leech"), 2)
        assert leech == extremal_form(12, 2).expansion
        assert leech[2] == 196560


@pytest.mark.slow
def test_criterion_04_leech_q3():
    with criterion("4s", "theta(Leech) agrees with E4^3 - 720Δ to N=3 within 10 min"):
        start = time.perf_counter()
        leech = theta_series(load_fixture("Leech"), 3)
        assert leech == extremal_form(12, 3).expansion
        assert leech[3] == 16773120
        assert time.perf_counter() - start < 600


def test_criterion_05_e6_generators():
    with criterion(5, "theta(F) ≡ E6 mod 5 and theta([1,1,3]) ≡ E6 mod 11 at N=20"):
        e6 = eisenstein(6, 20)
        assert verify_congruence(theta_series(load_fixture("F"), 20), e6, 5, 20)[0]
        assert verify_congruence(theta_series(load_fixture("[1,1,3]"), 20), e6, 11, 20)[0]


def _full_lift_checks(L, ell):
    lift = hat_lattice(L, ell)          # asserts evenness, level, fixed Gram, order
    hat, sigma = lift.hat_lattice, lift.sigma
    assert all(hat.gram[i][i] % 2 == 0 for i in range(hat.rank))
    assert hat.level % ell and all(p % ell != ell - 1 for p in _primes(hat.level))
    assert alg.congruence(hat.gram, lift.fixed_embedding) == L.gram
    assert is_power_of(sigma.order, ell)
    assert fixed_subgroup_order(discriminant_group(hat), sigma.matrix) == 1
    assert hat.det % ell == 1
    assert hat.rank % 4 == 0
    ok, bad = verify_congruence(theta_series(hat, 10, reduce=True), theta_series(L, 10), ell, 10)
    assert ok, f"theta mismatch at q^{bad}"


def _primes(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    return out + ([n] if n > 1 else [])


def test_criterion_06_lifting_round_trip():
    with criterion(6, "lifting round trip on fixtures and 10 random level-ell lattices in < 60 s"):
        start = time.perf_counter()
        for name, ell in [("[1,1,2]", 7), ("[1,1,3]", 11), ("F", 5)]:
            _full_lift_checks(load_fixture(name), ell)
        rng = random.Random(20240607)
        for _ in range(10):
            # level 5 is impossible in rank <= 3, so every random lattice has level 7
            _full_lift_checks(random_level_ell_lattice(rng, 7), 7)
        assert time.perf_counter() - start < 60


def test_criterion_07_oracle_equivalence():
    with criterion(7, "theta_series = brute force on 50 random lattices; 20 basis changes"):
        rng = random.Random(7)
        for _ in range(50):
            L = random_even_lattice(rng, rng.randint(1, 4), bound=20)
            assert theta_series(L, 15) == brute_force_counts(L, 15), L.gram
        for _ in range(20):
            L = random_even_lattice(rng, rng.randint(2, 4), bound=20)
            u = random_unimodular(rng, L.rank, steps=8, size=3)
            assert theta_series(transform(L, u), 15) == theta_series(L, 15)


def test_criterion_08_milgram():
    with criterion(8, "Milgram residual < 1e-9 on all fixtures"):
        for name in FIXTURES:
            assert milgram_residual(load_fixture(name)) < 1e-9, name
        assert milgram_residual(direct_sum(*[load_fixture("F")] * 3)) < 1e-9


def test_criterion_09_weight_residue():
    with criterion(9, "weight residue formula consistent on fixtures and random lattices"):
        for name, ell in ELL_OF.items():
            weight_residue(load_fixture(name), ell)
        rng = random.Random(9)
        F = load_fixture("F")
        for _ in range(10):
            weight_residue(random_level_ell_lattice(rng, 7), 7)
            weight_residue(transform(F, random_unimodular(rng, 4)), 5)
        weight_residue(direct_sum(F, F), 5)
        weight_residue(direct_sum(load_fixture("[1,1,2]"), load_fixture("E8")), 7)


@pytest.mark.slow
def test_criterion_10_neighbors():
    with criterion(10, "neighbour sum on F⊕F⊕F reproduces E6 mod 5 to N=10 within 15 min"):
        start = time.perf_counter()
        F = load_fixture("F")
        total, rep = eisenstein_from_neighbors(direct_sum(F, F, F), 5, 10)
        assert total == e6_reduced(5, 10)
        assert time.perf_counter() - start < 900


def test_criterion_11_property_suites():
    with criterion(11, "orbit congruence, rank bookkeeping, ell-power indices, series laws"):
        rng = random.Random(11)
        for name, ell in [("[1,1,2]", 7), ("[1,1,3]", 11), ("F", 5), ("E8", 5)]:
            lift = hat_lattice(load_fixture(name), ell)
            hat = lift.hat_lattice
            v, u_conj = _conjugate(lift.sigma.matrix, rng)
            for moved, u in ((hat, lift.sigma.matrix), (transform(hat, v), u_conj)):
                sigma = make_automorphism(moved, u)
                assert check_fixed_congruence(moved, sigma, ell, 8)
                fixed, _ = fixed_lattice(moved, sigma)
                assert (moved.rank - fixed.rank) % (ell - 1) == 0
                rep = index_report(moved, sigma, ell)
                assert is_power_of(rep.index_in_det_fixed, ell)
                assert is_power_of(rep.index_in_fixed_det, ell)
        for _ in range(20):
            a, b, c = (QSeries([rng.randint(-9, 9) for _ in range(8)]) for _ in range(3))
            assert (a * b) * c == a * (b * c) and a * (b + c) == a * b + a * c
            m = tuple(tuple(rng.randint(-5, 5) for _ in range(3)) for _ in range(3))
            if alg.determinant(m):
                d = alg.smith_normal_form(m)
                assert all(d[i + 1] % d[i] == 0 for i in range(2))
                assert abs(alg.determinant(m)) == d[0] * d[1] * d[2]


def _conjugate(u, rng):
    """``(V, V⁻¹ U V)`` for a random unimodular ``V``."""
    v = random_unimodular(rng, len(u), steps=6, size=1)
    vinv = alg.as_int_matrix(alg.rational_inverse(v))
    return v, alg.matmul(vinv, alg.matmul(u, v))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"] + sys.argv[1:]))
