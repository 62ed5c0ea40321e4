import csv
import io
import json

import pytest

from niltheta.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_orbit_classification(capsys):
    code, out, _ = run(capsys, "orbits", "classify", "--covector", "0,0,0,0,-2")
    assert code == 0
    assert json.loads(out) == {"class": "FourDim", "mu": -2}


def test_normalizer(capsys):
    _, out, _ = run(capsys, "orbits", "normalize", "--covector", "1,2/3,3,4,5")
    assert json.loads(out)["image"] == [0, 0, 0, 0, 5]


def test_intpoints_csv(capsys):
    code, out, _ = run(capsys, "intpoints", "--k", "3", "--emit", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 36
    assert set(rows[0]) == {"m", "n", "orbit_id"}


def test_intpoints_window_labels_orbits(capsys):
    _, out, _ = run(capsys, "intpoints", "--k", "1", "--window", "3", "--format", "json")
    payload = json.loads(out)
    assert len(payload["rows"]) == 49
    assert {r["orbit_id"] for r in payload["rows"]} == {0, 1, 2, 3}


def test_bnf_order_three(capsys):
    _, out, _ = run(capsys, "bnf", "--order", "3")
    payload = json.loads(out)
    assert payload["K3"] == {"text": "0", "terms": []}


def test_bnf_vacuum(capsys):
    _, out, _ = run(capsys, "bnf")
    assert json.loads(out)["vacuum_K4"] == "-1/48"


def test_group_arithmetic_is_exact(capsys):
    _, out, _ = run(capsys, "group", "multiply", "--g", "1,2,3,1/2,1", "--h", "1/3,0,1,2,0")
    assert json.loads(out) == {"product": ["4/3", "2", "10/3", "5/2", "17/9"], "psi": "8/9"}
    _, out, _ = run(capsys, "group", "reduce", "--g", "5/2,-1/3,7,3/2,1/5")
    assert json.loads(out)["reduced"][:4] == ["1/2", "2/3", "1/2", "1/2"]


def test_subalgebra_and_foliation(capsys):
    _, out, _ = run(capsys, "subalg", "e", "inf", "--covector", "0,0,0,0,1")
    payload = json.loads(out)
    assert payload["is_ideal"] and payload["is_subordinate"] and payload["is_lagrangian"]
    _, out, _ = run(capsys, "foliate", "--e", "-1", "--x", "0,1,2")
    payload = json.loads(out)
    assert payload["special_lagrangian"] and not payload["torus_fiber"]


def test_theta_check(capsys):
    code, out, _ = run(capsys, "theta", "check", "--k", "2", "--point", "0.1,0.2,0.3,0.4")
    assert code == 0 and json.loads(out)["passed"]


def test_spectrum(capsys):
    _, out, _ = run(capsys, "spectrum", "--k", "1", "--count", "2")
    assert json.loads(out)["converged"]
    _, out, _ = run(capsys, "spectrum", "--eps", "0", "--count", "3", "--format", "csv")
    assert out.splitlines()[1].startswith("0,2.0")


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["quantize", "--k", "1", "--point", "0.1,0.2,0.3,0.4", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["count"] == 4


@pytest.mark.parametrize("argv", [
    ["orbits", "classify", "--covector", "1,2"],
    ["orbits", "normalize", "--covector", "1,2,3,4,0"],
    ["subalg", "bd", "0", "1"],
    ["spectrum", "--k", "0"],
    ["bnf", "--order", "7"],
    ["intpoints", "--k", "0"],
    ["verify", "99"],
    ["nonsense"],
])
def test_validation_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "validation"


def test_nonconvergence_exit_code(capsys):
    code, _, err = run(capsys, "spectrum", "--k", "1", "--N", "4")
    assert code == 3
    assert json.loads(err)["error"] == "nonconvergence"


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "3")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "unitarity-orthogonality")
    assert code == (0 if json.loads(out)["passed"] else 1)
