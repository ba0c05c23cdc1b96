import json
from collections import Counter

import pytest

from thetacong.fixtures import FIXTURES, build_fixture_data, fixture_path, golay_code, load_fixture
from thetacong.theta import theta_series


def test_all_fixtures_load():
    for name in FIXTURES:
        L = load_fixture(name)
        assert L.rank > 0


def test_packaged_data_matches_construction():
    data = build_fixture_data()
    for name in FIXTURES:
        assert json.loads(fixture_path(name).read_text()) == data[name]


def test_golay_weight_distribution():
    code = golay_code()
    assert Counter(sum(w) for w in code) == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def test_leech_invariants():
    L = load_fixture("Leech")
    assert (L.rank, L.det, L.level) == (24, 1, 1)
    assert theta_series(L, 2).coeffs == (1, 0, 196560)


@pytest.mark.slow
def test_leech_q3():
    assert theta_series(load_fixture("Leech"), 3).coeffs == (1, 0, 196560, 16773120)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture_path("D4")
