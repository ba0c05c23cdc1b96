import json

import pytest

from thetacong.cli import main
from thetacong.congruence import verify_certificate_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def l112(tmp_path):
    p = tmp_path / "l112.json"
    p.write_text(json.dumps({"gram": [[2, 1], [1, 4]]}))
    return str(p)


def test_analyze(capsys, l112):
    code, out, _ = run(capsys, "analyze", l112)
    assert code == 0
    assert out.strip() == "rank 2, det 7, divisors 1,7, level 7, e=8, weight 4"
    code, out, _ = run(capsys, "analyze", "fixture:E8")
    assert "level 1" in out
    code, out, _ = run(capsys, "analyze", l112, "--l", "7")
    assert "grading t = 4 mod 6" in out


def test_analyze_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gram": [[2, 1], [0, 2]]}))
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "NotSymmetric" in err
    bad.write_text("{")
    assert run(capsys, "analyze", str(bad))[0] == 2
    assert run(capsys, "analyze", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "analyze", "fixture:D4")[0] == 2


def test_congruence(capsys, l112):
    code, out, _ = run(capsys, "congruence", l112, "--l", "7")
    assert code == 0 and "form E4" in out and "verified to q^20" in out
    code, out, _ = run(capsys, "congruence", l112, "--l", "7", "--table", "-N", "3")
    assert out.splitlines()[-1] == "3 0 6720 0"


def test_congruence_json_round_trip(capsys):
    code, out, _ = run(capsys, "congruence", "fixture:[2,1,4]", "--l", "31", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["coords"] == [1, 1]
    assert verify_certificate_dict(data)


def test_precondition_exit(capsys, l112):
    assert run(capsys, "congruence", l112, "--l", "5")[0] == 3
    assert run(capsys, "congruence", l112, "--l", "3")[0] == 3
    assert run(capsys, "neighbors", "fixture:F", "--l", "5")[0] == 3
    assert run(capsys, "theta", l112, "-N", "0")[0] == 2


def test_extremal(capsys):
    code, out, _ = run(capsys, "extremal", "--k", "36", "-N", "3")
    assert code == 0
    assert "coords 1,-2160,965520,-27302400" in out
    assert "form E4^9 - 2160*E4^6*Δ + 965520*E4^3*Δ^2 - 27302400*Δ^3" in out


def test_theta(capsys):
    code, out, _ = run(capsys, "theta", "fixture:E8", "-N", "3")
    assert out.strip() == "1 240 2160 6720"
    code, out, _ = run(capsys, "theta", "fixture:E8", "-N", "3", "--json")
    assert json.loads(out)["coefficients"] == [1, 240, 2160, 6720]


def test_lift(capsys, l112):
    code, out, _ = run(capsys, "lift", l112, "--l", "7")
    assert code == 0
    assert out.startswith("hat rank 8")
    assert "ok det_hat_fixed_order 1" in out and "ok certificate_form E4" in out
    code, out, _ = run(capsys, "lift", l112, "--l", "7", "--json")
    data = json.loads(out)
    assert data["lift"]["sigma_order"] == 7 and len(data["lift"]["hat_gram"]) == 8


def test_fixed(capsys, l112, tmp_path):
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"matrix": [[1, 0], [0, 1]]}))
    code, out, _ = run(capsys, "fixed", l112, str(a), "--l", "7")
    assert code == 0 and "fixed gram [[2, 1], [1, 4]]" in out
    a.write_text(json.dumps({"matrix": [[1, 1], [0, 1]]}))
    code, _, err = run(capsys, "fixed", l112, str(a))
    assert code == 2 and "NotIsometry" in err


def test_deterministic_output(capsys):
    first = run(capsys, "theta", "fixture:F", "-N", "15", "--threads", "3")[1]
    second = run(capsys, "theta", "fixture:F", "-N", "15", "--threads", "1")[1]
    assert first == second
    a = run(capsys, "lift", "fixture:F", "--l", "5", "--json")[1]
    b = run(capsys, "lift", "fixture:F", "--l", "5", "--json")[1]
    assert a == b
