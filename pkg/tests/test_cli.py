import json
import pathlib
import subprocess
import sys

import pytest

from selfcloseness.cli import run

GOLDEN = pathlib.Path(__file__).parent / "golden"
CASES = json.loads((GOLDEN / "cases.json").read_text(encoding="utf-8"))

THREE_CELL = "space X { sphere a:3  sphere b:5  cell w:12 attach [a,[a,[a,b]]] + [b,[a,b]] }\n"


def machine(*argv):
    code, out, err = run(list(argv) + ["--format", "machine"])
    assert code == 0, err
    return json.loads(out)


@pytest.mark.parametrize("case", CASES, ids=[c["file"] for c in CASES])
def test_golden(case):
    want = json.loads((GOLDEN / case["file"]).read_text(encoding="utf-8"))
    assert want["argv"] == case["argv"] and want["reproduces"] == case["reproduces"]
    code, out, err = run(case["argv"] + ["--format", "machine"])
    assert code == want["exit"]
    if code == 0:
        assert json.loads(out) == want["report"]
    else:
        assert err.strip() == want["error"]


def test_golden_files_name_their_source():
    for case in CASES:
        assert case["reproduces"]


@pytest.mark.parametrize("argv", [["nse", "four-cell(a=1,b=1,c=1)"], ["homology", "S^3vS^5vS^12"],
                                  ["mimura-toda", "1", "1", "1"], ["examples"], ["connsum"]])
def test_byte_identical_reruns(argv):
    first = run(argv + ["--format", "machine"])
    second = run(argv + ["--format", "machine"])
    assert first == second


def test_byte_identical_across_processes():
    argv = [sys.executable, "-m", "selfcloseness.cli", "selfmaps", "three-cell(a=1,b=1)", "--format", "machine"]
    outs = {subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)}
    assert len(outs) == 1


def test_nse_four_cell_case_one():
    r = machine("nse", "four-cell(a=1,b=1,c=1)")["result"]
    assert (r["value"], r["group_rank"]) == (2, 1)


def test_group_four_attach():
    assert machine("group", "four-attach(a=0,b=1)")["result"]["rank"] == 2


def test_mimura_toda_by_name():
    r = machine("mimura-toda", "mimura-toda(a=1,b=1,c=1)")["result"]
    assert r["system"] == "s=λ²μ⁴=λ⁶μ=λ⁵μ²"
    assert r["solutions"]["solutions"] == [{"λ": 1, "μ": 1, "s": 1}]
    assert r["solutions"]["status"] == "COMPLETE"
    assert r["conclusion"] == "N𝓔=3"


def test_report_schema():
    rep = machine("nse", "CP^2", "--seed", "5")
    assert set(rep) == {"command", "input", "result", "engine", "seed"}
    assert rep["seed"] == 5 and rep["engine"]["name"] == "selfcloseness"
    assert rep["input"]["digest"].startswith("sha256:")


def test_spec_file_input(tmp_path):
    f = tmp_path / "x.spec"
    f.write_text(THREE_CELL, encoding="utf-8")
    r = machine("nse", str(f))["result"]
    assert r["value"] == 5


def test_algebra_block_selection(tmp_path):
    f = tmp_path / "two.spec"
    f.write_text("algebra A { gen x:2  relation x^4  truncate 6 }\n"
                 "algebra B { gen a:2  gen b:4  relation a^2  relation b^2  truncate 6 }\n", encoding="utf-8")
    assert machine("csymplectic", str(f), "--block", "A")["result"]["c_symplectic"] is True
    assert machine("csymplectic", str(f), "--block", "B")["result"]["c_symplectic"] is False


def test_parse_error_reports_location(tmp_path):
    f = tmp_path / "bad.spec"
    f.write_text("space X { cell w:4 attach [a,a] }\n", encoding="utf-8")
    code, out, err = run(["model", str(f)])
    assert code == 1 and "line 1, column 28" in err and "undeclared name a" in err


@pytest.mark.parametrize("argv,code", [
    (["nse", "CP^2vCP^2"], 2),
    (["formal", "CP^2"], 2),
    (["nse", "no-such-space"], 1),
    (["nse", "four-cell(a=0,b=1,c=1)"], 1),
    (["pd", "S^3"], 1),
    (["nse", "/nonexistent/file.spec"], 1),
    (["frobnicate", "CP^2"], 1),
    (["nse"], 1),
    (["nse", "CP^2", "--format", "xml"], 1),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_bounds_flag_lifts_refusal():
    r = machine("nse", "CP^2vCP^2", "--bounds")["result"]
    assert r["rational_bounds"] == [2, 4]


def test_human_output_uses_same_payload():
    code, out, _ = run(["nse", "three-cell(a=1,b=1)"])
    assert code == 0
    assert "value: 5" in out and "CERTIFIED" in out


def test_console_script_entry_point():
    p = subprocess.run([sys.executable, "-m", "selfcloseness.cli", "examples"], capture_output=True, text=True)
    assert p.returncode == 0 and "four-cell(a=,b=,c=)" in p.stdout
