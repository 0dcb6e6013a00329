import io
import json

import pytest

from mvop.cli import EXIT_FAIL, EXIT_OK, EXIT_PARAMS, EXIT_USAGE, run

ONE = ["one-step", "--alpha", "3", "--beta", "5", "--k", "2"]
TWO = ["two-step", "--alpha", "2", "--beta", "6", "--k1", "2", "--k2", "4"]


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_polys_json_encoding():
    code, out, _ = call(ONE + ["--no-timing", "polys", "--n", "1"])
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["family"] == "one-step" and rep["params"] == {"alpha": "3", "beta": "5", "k": "2"}
    p0 = rep["data"]["polynomials"]["0"]
    assert p0 == [[["1", "1", "1"], ["0", "-1", "-9/4"], ["0", "0", "9/2"]]]
    assert len(rep["data"]["polynomials"]["1"]) == 2
    assert all("timing" not in c for c in rep["checks"])


def test_deterministic_output():
    argv = TWO + ["--no-timing", "check", "eigen", "--n", "3"]
    assert call(argv)[1] == call(argv)[1]


def test_timing_present_by_default():
    rep = json.loads(call(ONE + ["weights", "verify-ode"])[1])
    assert all("timing" in c for c in rep["checks"])


@pytest.mark.parametrize("fmt,marker", [("csv", "check,status,detail"), ("md", "| check | status | detail |")])
def test_table_formats(fmt, marker):
    code, out, _ = call(ONE + ["--format", fmt, "--no-timing", "check", "symmetry", "--op", "D1", "--degree", "3"])
    assert code == EXIT_OK and marker in out


def test_out_file(tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = call(ONE + ["--out", str(target), "--no-timing", "conjugate", "verify"])
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["command"] == "conjugate verify"


def test_dims_example():
    code, out, _ = call(ONE + ["--no-timing", "algebra", "dims", "--max-order", "8"])
    assert code == EXIT_OK
    table = json.loads(out)["data"]["table"]
    assert [int(r[1]) for r in table[1:]] == [1, 0, 2, 0, 3, 0, 3, 0, 3]


def test_relations_example():
    code, out, _ = call(TWO + ["--no-timing", "algebra", "relations", "--which", "fact-analogues"])
    assert code == EXIT_OK
    assert len(json.loads(out)["checks"]) == 8


def test_failing_check_exits_one_with_witness():
    code, out, _ = call(TWO + ["--no-timing", "conjugate", "verify"])
    assert code == EXIT_FAIL
    bad = [c for c in json.loads(out)["checks"] if c["status"] == "fail"]
    assert bad and {"entry", "lhs", "rhs"} <= set(bad[0]["witness"])


def test_ef_symmetry_failures_are_evidence():
    code, out, _ = call(TWO + ["--no-timing", "algebra", "recover-ef"])
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["E is not symmetric"]["status"] == "pass"
    assert checks["E leading coefficient equals corrected G4"]["status"] == "pass"
    assert code == EXIT_FAIL  # the displayed G4 differs in two entries


def test_alpha_one_accepted():
    # the weight coefficients depend on beta and k, so alpha = 1 is not degenerate
    code, _, _ = call(["one-step", "--alpha", "1", "--beta", "5", "--k", "2", "polys", "--n", "3"])
    assert code == EXIT_OK


def test_invalid_parameters_exit_two():
    code, _, err = call(["two-step", "--alpha", "2", "--beta", "6", "--k1", "4", "--k2", "2", "polys", "--n", "1"])
    assert code == EXIT_PARAMS and "k1 < k2" in err
    code, _, err = call(["one-step", "--alpha=-3/2", "--beta", "5", "--k", "2", "polys", "--n", "1"])
    assert code == EXIT_PARAMS and "alpha > -1" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ONE,
        ["one-step", "--alpha", "3.0", "--beta", "5", "--k", "2", "polys", "--n", "1"],
        ONE + ["polys"],
        ONE + ["check", "symmetry", "--op", "Z", "--degree", "2"],
        ONE + ["algebra", "relations", "--which", "fe"],
        ONE + ["algebra", "recover-ef"],
        ONE + ["polys", "--n", "-1"],
    ],
)
def test_usage_errors(argv):
    assert call(argv)[0] == EXIT_USAGE


def test_hypergeom_commands():
    assert call(ONE + ["hypergeom", "verify", "--n", "3"])[0] == EXIT_OK
    code, out, _ = call(TWO + ["hypergeom", "factor-ab", "--n", "1", "--precision", "256"])
    assert code == EXIT_OK
    assert json.loads(out)["checks"][1]["witness"]["A[1,1]"].startswith("-1")


def test_check_orthogonality_and_commutant():
    assert call(TWO + ["check", "orthogonality", "--n", "3"])[0] == EXIT_OK
    code, out, _ = call(TWO + ["algebra", "commutant", "--op", "D1", "--order", "2"])
    assert code == EXIT_OK and json.loads(out)["data"]["dimension"] == 4
