import json

import pytest

from ellcommute.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_complex


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    try:
        data = json.loads(out)
    except json.JSONDecodeError:
        data = None
    return code, data


@pytest.mark.parametrize("text,val", [("i", 1j), ("-i", -1j), ("0.5+i", 0.5 + 1j), ("2+0i", 2), ("1e-3+2i", 1e-3 + 2j)])
def test_parse_complex(text, val):
    assert parse_complex(text) == val


def test_dim_k3(capsys):
    code, data = run(capsys, "commutant", "dim", "--K", "3")
    assert code == EXIT_OK and data["dim"] == 1


def test_malformed_principal_is_usage_error(capsys):
    code, _ = run(capsys, "commutant", "build", "--preset", "lame", "--principal", "[0,1,0]")
    assert code == EXIT_USAGE


def test_missing_operator_source(capsys):
    code, _ = run(capsys, "ba", "xi")
    assert code == EXIT_USAGE


def test_bad_omega(capsys):
    code, _ = run(capsys, "ba", "xi", "--preset", "lame", "--omega", "-i")
    assert code == EXIT_USAGE


def test_ba_xi(capsys):
    code, data = run(capsys, "ba", "xi", "--preset", "lame", "--smax", "4", "--zorder", "12")
    assert code == EXIT_OK and data["passed"] and len(data["xi"]) == 5


def test_unrealizable_principal_fails(capsys):
    code, _ = run(capsys, "commutant", "build", "--preset", "lame", "--B", "6", "--zorder", "24", "--smax", "12",
                  "--principal", "[1,0,0,0,0,0]")
    assert code == EXIT_FAIL


def test_curve_roundtrip_and_bc(capsys, tmp_path):
    curve = tmp_path / "curve.json"
    code, data = run(capsys, "curve", "compute", "--preset", "lame", "--omega", "0.5+i", "--curve-out", str(curve))
    assert code == EXIT_OK and curve.exists()
    code, data = run(capsys, "curve", "verify-bc", "--preset", "lame", "--omega", "0.5+i", "--curve", str(curve))
    assert code == EXIT_OK and data["passed"]


def test_genus_requires_coprimality_flag_or_series(capsys):
    code, data = run(capsys, "curve", "genus", "--preset", "lame", "--coprime")
    assert code == EXIT_OK and data["genus"]["varpi"] == 1


def test_modular_weight(capsys):
    code, data = run(capsys, "modular", "verify-weight", "--form", "wp", "--alpha", "S")
    assert code == EXIT_OK and data["passed"]


def test_monodromy_run(capsys):
    code, data = run(capsys, "monodromy", "run", "--preset", "lame", "--X", "2+0i", "--loop-preset", "around0",
                     "--with-q")
    assert code == EXIT_OK and data["passed"]


def test_verify_all_golden_path(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, data = run(capsys, "--out", str(out), "verify", "all", "--preset", "lame", "--omega", "i")
    assert code == EXIT_OK
    saved = json.loads(out.read_text())
    assert saved == data
    text = json.dumps(data)
    assert "g2/4" in text or "g2_over_4" in text
