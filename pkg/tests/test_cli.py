import csv
import io
import json
import math
import subprocess
import sys

import pytest

from lgwb.cli import main

from conftest import DATA, LN10


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_analyze_cp2_lambda_check(capsys):
    code, rep = report(capsys, "analyze", DATA / "cp2.json", "--lambda-check")
    assert code == 0
    assert list(rep)[:5] == ["schema", "tool_version", "command", "input_echo", "config_echo"]
    assert rep["schema"] == 1 and rep["summary"] == {"count": 3, "in_domain": 3}
    check = rep["eigenvalue_check"]
    assert check["benchmark"] == "cp2"
    assert check["match"]["ok"] and check["match"]["max_distance"] < 1e-8


@pytest.mark.parametrize("name,bench", [("cp1", "cp1"), ("cp3", "cp3"), ("p1p1", "p1p1")])
def test_analyze_other_benchmarks(capsys, name, bench):
    code, rep = report(capsys, "analyze", DATA / f"{name}.json", "--benchmark", bench)
    assert code == 0 and rep["eigenvalue_check"]["match"]["ok"]


def test_analyze_f3(capsys):
    code, rep = report(capsys, "analyze", DATA / "f3.json")
    assert code == 0 and rep["summary"] == {"count": 5, "in_domain": 4}
    assert rep["eigenvalue_check"] is None
    for p in rep["critical_points"]:
        assert set(p) >= {"z", "value", "residual", "in_domain"}


def test_renormalize_f3(capsys):
    code, rep = report(capsys, "renormalize", DATA / "f3.json", "--inflate", 10 * math.pi)
    assert code == 0 and rep["summary"] == {"count": 5, "in_domain": 5}
    code, rep2 = report(capsys, "analyze", DATA / "f3.json", "--inflate", 10 * math.pi)
    assert rep2["summary"] == rep["summary"]


def test_benchmark_shape_mismatch_is_input_error(capsys):
    code, out, err = run(capsys, "analyze", DATA / "cp2.json", "--benchmark", "p1p1")
    assert code == 1 and "p1p1" in err


def test_starved_solver_fails_verification(capsys):
    # Two Newton steps are not enough, so the eigenvalue check cannot match.
    code, rep = report(capsys, "analyze", DATA / "cp2.json", "--benchmark", "cp2", "--max-iter", 2)
    assert code == 2 and not rep["eigenvalue_check"]["match"]["ok"]


def test_lambda_check_on_non_benchmark_is_input_error(capsys):
    code, out, err = run(capsys, "analyze", DATA / "f3.json", "--lambda-check")
    assert code == 1 and "error" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "no/such/file.json"],
    ["analyze"],
    ["family", "cp2"],
    ["family", "cp2_clifford", "--lambda", "-1"],
    ["wallcross", "f3"],
    ["frobnicate"],
])
def test_input_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""


def test_bad_polytope_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "facets": [{"normal": [1, 0], "two_pi_alpha": 0}]}')
    assert run(capsys, "analyze", bad)[0] == 1
    bad.write_text("not json")
    assert run(capsys, "analyze", bad)[0] == 1


def test_family_counts(capsys):
    assert report(capsys, "family", "p1p1_chekanov", "--l1", 2 * LN10, "--l2", 2 * LN10)[1]["summary"]["count"] == 2
    assert report(capsys, "family", "hirzebruch", "--m", 4)[1]["summary"]["count"] == 6
    code, rep = report(capsys, "family", "cp2_chekanov", "--lambda", 3 * LN10, "--lambda-check")
    assert code == 0 and rep["summary"]["count"] == 3 and rep["eigenvalue_check"]["match"]["ok"]


def test_wallcross_cp2(capsys):
    code, rep = report(capsys, "wallcross", "cp2")
    assert code == 0
    v = rep["verdicts"]
    assert v["gluing"]["identity_holds"] is True
    assert v["monodromy"]["matrix"] == [[1, 0], [1, 1]]
    assert v["lost_values"]["lost_on_source"] == [] and v["lost_values"]["lost_on_target"] == []


def test_wallcross_p1p1_lost_zeros(capsys):
    code, rep = report(capsys, "wallcross", "p1p1")
    assert code == 0
    lv = rep["verdicts"]["lost_values"]
    assert lv["lost_on_target"] == [{"re": 0, "im": 0}] * 2 and lv["lost_on_source"] == []


def test_wallcross_classical_fails(capsys):
    code, rep = report(capsys, "wallcross", "cp2", "--classical")
    assert code == 2 and rep["verdicts"]["gluing"]["identity_holds"] is False


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_plotdata_cp2(capsys):
    code, out, _ = run(capsys, "plotdata", DATA / "cp2.json")
    assert code == 0
    r = rows(out)
    kinds = [x["kind"] for x in r]
    assert kinds.count("vertex") == 3 and kinds.count("close") == 1 and kinds.count("critical") == 3
    assert all(x["in_domain"] == "true" for x in r if x["kind"] == "critical")
    first = next(x for x in r if x["kind"] == "vertex")
    close = next(x for x in r if x["kind"] == "close")
    assert (first["x"], first["y"]) == (close["x"], close["y"])


def test_plotdata_f3_one_outside(capsys):
    r = rows(run(capsys, "plotdata", DATA / "f3.json")[1])
    crit = [x for x in r if x["kind"] == "critical"]
    assert sum(x["kind"] == "vertex" for x in r) == 4 and len(crit) == 5
    assert sum(x["in_domain"] == "false" for x in crit) == 1


def test_plotdata_empty_critical_set(capsys, tmp_path):
    # A non-compact region gives a potential with no critical points.
    p = tmp_path / "quadrant.json"
    p.write_text('{"dim": 2, "facets": [{"normal": [1, 0], "two_pi_alpha": 0}, {"normal": [0, 1], "two_pi_alpha": 0}, '
                 '{"normal": [-1, 0], "two_pi_alpha": 1}, {"normal": [0, -1], "two_pi_alpha": 1}]}')
    code, out, _ = run(capsys, "plotdata", p)
    assert code == 0 and rows(out)
    p.write_text('{"dim": 2, "facets": [{"normal": [1, 0], "two_pi_alpha": 0}, {"normal": [0, 1], "two_pi_alpha": 0}, '
                 '{"normal": [-1, 0], "two_pi_alpha": 1}]}')
    assert run(capsys, "plotdata", p)[0] == 1


def test_out_flag(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, stdout, _ = run(capsys, "analyze", DATA / "cp2.json", "--out", out)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["summary"]["count"] == 3


def test_float_formatting(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "cp2.json")
    assert '"dedup_tol": 9.9999999999999995e-07' in out


@pytest.mark.parametrize("argv", [
    ["analyze", str(DATA / "f3.json")],
    ["wallcross", "p1p1"],
    ["family", "hirzebruch", "--m", "5", "--seed", "3"],
    ["plotdata", str(DATA / "f3.json")],
])
def test_reports_are_byte_identical(argv):
    outs = [subprocess.run([sys.executable, "-m", "lgwb", *argv], capture_output=True, check=False).stdout
            for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]


def test_solver_flags_echoed(capsys):
    code, rep = report(capsys, "analyze", DATA / "cp2.json", "--newton-tol", "1e-11", "--grid-angles", "5",
                       "--max-iter", "80", "--dedup-tol", "1e-7", "--seed", "4")
    assert code == 0
    assert rep["config_echo"] == {"newton_tol": 1e-11, "max_iter": 80, "dedup_tol": 1e-7, "grid_angles": 5, "seed": 4}
    assert rep["summary"]["count"] == 3
