from fractions import Fraction

import pytest

from thetacong.exceptions import PreconditionError
from thetacong.modforms import (
    FpSeries,
    _eisenstein_series,
    basis_Mk,
    bernoulli,
    delta,
    delta_product,
    dim_Mk,
    eisenstein,
    extremal_form,
    form_from_coords,
    monomial_basis,
    reduce_mod,
    sturm_bound,
)
from thetacong.qseries import QSeries
from thetacong import algebra as alg


def test_bernoulli():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(6) == Fraction(1, 42)
    assert bernoulli(12) == Fraction(-691, 2730)
    with pytest.raises(ValueError):
        bernoulli(5)


def test_eisenstein_expansions():
    assert eisenstein(4, 3).expansion.coeffs == (1, 240, 2160, 6720)
    assert eisenstein(6, 2).expansion.coeffs == (1, -504, -16632)
    assert all(eisenstein(k, 5).expansion[0] == 1 for k in (4, 6, 8, 10, 12, 14))


def test_delta():
    assert delta(5).expansion.coeffs == (0, 1, -24, 252, -1472, 4830)
    assert delta(50).expansion == delta_product(50)
    assert delta(50).expansion.is_integral()


def test_dimensions():
    assert [dim_Mk(k) for k in (0, 2, 4, 12, 14, 24, 36)] == [1, 0, 1, 2, 1, 3, 4]
    assert sturm_bound(36) == 4
    with pytest.raises(PreconditionError):
        dim_Mk(3)


def test_bases():
    assert monomial_basis(4) == ((1, 0, 0),)
    assert monomial_basis(12) == ((3, 0, 0), (0, 0, 1))
    assert len(basis_Mk(36, 5)) == 4
    for k in (4, 12, 16, 24, 36, 38):
        b = basis_Mk(k, 10)
        d = len(b)
        mat = tuple(tuple(b[j].expansion[i] for j in range(d)) for i in range(d))
        assert alg.determinant(mat) != 0


@pytest.mark.parametrize("k,coords", [
    (12, (1, -720)),
    (16, (1, -960)),
    (24, (1, -1440, 125280)),
    (36, (1, -2160, 965520, -27302400)),
])
def test_extremal_coordinates(k, coords):
    f = extremal_form(k, 10)
    assert f.coords == coords and f.is_integral()


def test_describe():
    assert extremal_form(12, 3).describe() == "E4^3 - 720*Δ"
    assert eisenstein(6, 3).describe() == "E6"


def test_relations_e10_e14():
    e10 = _eisenstein_series(10, 50)
    e14 = _eisenstein_series(14, 50)
    e4, e6 = _eisenstein_series(4, 50), _eisenstein_series(6, 50)
    assert e10 == e4 * e6
    assert e14 == e4 * e4 * e6


@pytest.mark.parametrize("ell", [5, 7, 11])
def test_e_ell_minus_one_is_one_mod_ell(ell):
    red = reduce_mod(_eisenstein_series(ell - 1, 30), ell)
    assert red.coeffs == (1,) + (0,) * 30


def test_reduce_mod():
    assert reduce_mod(eisenstein(4, 2), 7).coeffs == (1, 2, 4)
    s = QSeries([3, 10, -4])
    r = reduce_mod(s, 7)
    assert reduce_mod(r.lift(), 7) == r
    with pytest.raises(PreconditionError):
        reduce_mod(QSeries([Fraction(1, 7)]), 7)
    assert reduce_mod(QSeries([Fraction(1, 2)]), 7).coeffs == (4,)


def test_fp_series():
    a = FpSeries(5, [1, 2, 3])
    b = FpSeries(5, [4, 4])
    assert (a + b).coeffs == (0, 1)
    assert (a * b).coeffs == (4, 2)
    assert (a * 3).coeffs == (3, 1, 4)


def test_form_from_coords():
    f = form_from_coords(12, (1, 16), 3)
    assert f.expansion == _eisenstein_series(4, 3) ** 3 + delta_product(3) * 16
