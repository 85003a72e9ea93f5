import json

import pytest

from exdiv.cli import main
from exdiv.lattice import FIXTURES, build_lattice, parse_forest


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture
def p2_file(tmp_path):
    # point 3 is proximate to 1 but 2 is not proximate to 1
    path = tmp_path / "bad.prox"
    path.write_text("points 3\nprox 3: 1 2\n")
    return str(path)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_lattice_json_round_trip(capsys, name):
    code, data = run_json(capsys, "lattice", name)
    L = build_lattice(parse_forest(FIXTURES[name]))
    assert code == 0
    assert data["gram_e"] == L.gram_e.tolist()
    assert data["basis_change"] == L.basis_change.tolist()
    assert data["negative_definite"] is True


def test_lattice_text(capsys):
    code, out, _ = run(capsys, "lattice", "CHAIN3")
    assert code == 0 and "(-2, 1, 0)" in out
    _, out, _ = run(capsys, "lattice", "CHAIN1")
    assert "  (-1)" in out.splitlines()


def test_lattice_from_file(capsys, tmp_path):
    path = tmp_path / "chain.prox"
    path.write_text(FIXTURES["SAT3"])
    code, data = run_json(capsys, "lattice", str(path))
    assert code == 0 and data["s"] == 3


def test_rule_violation_exit_code(capsys, p2_file):
    code, _, err = run(capsys, "lattice", p2_file)
    assert code == 2
    assert "P2" in err and "3" in err
    assert run(capsys, "validate", p2_file)[0] == 2


def test_missing_file(capsys):
    assert run(capsys, "lattice", "no/such/file.prox")[0] == 2


def test_enumerate_chain3(capsys):
    code, data = run_json(capsys, "enumerate", "CHAIN3", "--kdeg", "0", "--selfint", "-2")
    assert code == 0
    assert len(data["divisors"]) == 3
    assert sorted(d["type"] for d in data["divisors"]) == ["A1", "A1", "A2"]


def test_enumerate_rejects_nonnegative_square(capsys):
    assert run(capsys, "enumerate", "CHAIN3", "--kdeg", "0", "--selfint", "0")[0] == 2


def test_classify(capsys):
    code, data = run_json(capsys, "classify", "CHAIN3", "--divisor", "1,1,0")
    assert code == 0
    assert data["type"] == "A2" and data["self_intersection"] == -2 and data["arithmetic_genus"] == 0


@pytest.mark.parametrize("literal", ["1,x,0", "1,1", "", "1,,0"])
def test_malformed_divisor(capsys, literal):
    assert run(capsys, "classify", "CHAIN3", "--divisor", literal)[0] == 2


def test_dot_golden(capsys):
    code, out, _ = run(capsys, "dot", "CHAIN3", "--divisor", "1,1,1")
    assert code == 0
    assert out == (
        "graph dual {\n"
        '  e1 [label="e1 (self=-2)"];\n'
        '  e2 [label="e2 (self=-2)"];\n'
        '  e3 [label="e3 (self=-1)"];\n'
        "  e1 -- e2;\n"
        "  e2 -- e3;\n"
        "}\n"
    )


def test_dot_needs_reduced(capsys):
    assert run(capsys, "dot", "CHAIN3", "--divisor", "2,1,0")[0] == 2


def test_fundamental_cycle_type(capsys):
    code, out, _ = run(capsys, "fundamental-cycle", "D4")
    assert code == 0
    assert "multiplicities 2;1,1,1" in out and "Z^2 = -2" in out
    code, data = run_json(capsys, "fundamental-cycle", "E8")
    assert data["self_intersection"] == -2 and max(data["multiplicities"]) == 6
    assert sum(data["multiplicities"]) == 29


def test_fundamental_cycle_from_forest(capsys):
    code, data = run_json(capsys, "fundamental-cycle", "CHAIN3", "--divisor", "1,1,0")
    assert code == 0 and data["multiplicities"] == [1, 1] and data["type"] == "A2"


@pytest.mark.parametrize("bad", ["F4", "E9", "D3", "A0"])
def test_fundamental_cycle_unknown_type(capsys, bad):
    assert run(capsys, "fundamental-cycle", bad)[0] == 2


def test_theta(capsys):
    code, data = run_json(capsys, "theta", "CHAIN3", "--divisor", "1,0,0")
    assert code == 0 and data == {"j": 2, "theta": 2}
    assert run(capsys, "theta", "CHAIN3", "--divisor", "0,0,1")[0] == 2


def test_budget_families(capsys):
    code, data = run_json(capsys, "budget-families", "PAIR4")
    assert code == 0 and data["holds"]
    assert max(f["budget"] for f in data["families"]) <= data["s"]


def test_miyaoka_equality(capsys):
    code, data = run_json(capsys, "miyaoka", "--chi", "2", "--k2", "0", "--blowups", "0", "--sing", *["A1"] * 16)
    assert code == 0
    assert data["holds"] and data["slack"] == "0/1" and data["equality_implies_nef"]
    assert data["sum_nu"] == "24/1"


def test_miyaoka_repeated_flag(capsys):
    argv = ["miyaoka", "--chi", "1", "--k2", "1", "--blowups", "1", "--sing", "A2"]
    code, data = run_json(capsys, *argv)
    assert code == 0 and data["sum_nu"] == "8/3" and data["bound_theorem"] == "31/3"
    code, data = run_json(capsys, *argv, "--sing", "A1")
    assert data["sum_nu"] == "25/6"


def test_miyaoka_exit_codes(capsys):
    assert run(capsys, "miyaoka", "--chi", "0", "--k2", "0", "--blowups", "0", "--sing", "A1")[0] == 1
    assert run(capsys, "miyaoka", "--chi", "2", "--k2", "0", "--blowups", "0", "--sing", "F4")[0] == 2
    assert run(capsys, "miyaoka", "--chi", "2", "--k2", "0", "--blowups", "-1")[0] == 2


def test_miyaoka_text(capsys):
    code, out, _ = run(capsys, "miyaoka", "--chi", "0", "--k2", "0", "--blowups", "0", "--sing", "A1")
    assert code == 1 and "verdict: VIOLATED" in out and "slack: -3/2" in out


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_exit_codes_on_fixtures(capsys, name):
    s = build_lattice(parse_forest(FIXTURES[name])).s
    assert run(capsys, "validate", name)[0] == 0
    assert run(capsys, "check-props", name)[0] == 0
    assert run(capsys, "budget-families", name)[0] == 0
    assert run(capsys, "enumerate", name, "--kdeg", "-1", "--selfint", "-1")[0] == 0
    assert run(capsys, "classify", name, "--divisor", ",".join(["1"] + ["0"] * (s - 1)))[0] == 0


def test_check_props_json(capsys):
    code, data = run_json(capsys, "check-props", "SAT3")
    assert code == 0 and data["meta"]["cap"] >= 2


def test_exhaust_and_fuzz(capsys):
    code, data = run_json(capsys, "exhaust", "--points", "3")
    assert code == 0 and data["meta"]["forests"] == 1 + 2 + 7
    code, first = run(capsys, "fuzz", "--max-points", "5", "--count", "5", "--seed", "3", "--format", "json")[:2]
    second = run(capsys, "fuzz", "--max-points", "5", "--count", "5", "--seed", "3", "--format", "json")[1]
    assert code == 0 and first == second
    assert run(capsys, "exhaust", "--points", "9")[0] == 2


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["miyaoka", "--chi", "x"])
    assert exc.value.code == 2
