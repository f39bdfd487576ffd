import json
import os
import subprocess
import sys
from pathlib import Path

from dshift.cli import main

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out
    return code, json.loads(out), out

def test_check_ok(capsys):
    code, rep, _ = run(capsys, "check", DATA / "crit.dga")
    assert code == 0 and rep["ok"] and rep["schema"] == "dshift.report/1"
    assert rep["result"]["finitely_presented"]["data"]["H0_relations"] == ["x^2"]

def test_parse_error_location(capsys):
    code, rep, _ = run(capsys, "check", DATA / "bad_forward.dga")
    assert code == 2 and rep["error"]["kind"] == "parse"
    assert (rep["error"]["line"], rep["error"]["column"]) == (4, 7)

def test_positive_degree_rejected(capsys):
    code, rep, _ = run(capsys, "check", DATA / "bad_positive.dga")
    assert code == 2 and not rep["ok"]

def test_missing_file(capsys):
    code, rep, _ = run(capsys, "check", DATA / "nope.dga")
    assert code == 2 and rep["error"]["kind"] == "usage"

def test_cotangent(capsys):
    code, rep, _ = run(capsys, "cotangent", DATA / "fat_point.dga")
    assert code == 0
    assert rep["result"] == {"basis": [["d(x)", 0], ["d(zeta)", -1]],
                             "differential": {"d(zeta)": {"d(x)": "-2*x"}}}

def test_cohomology_needs_truncation(capsys):
    assert main(["cohomology", str(DATA / "fat_point.dga"), "--max-weight", "4"]) == 2
    capsys.readouterr()
    code, rep, _ = run(capsys, "cohomology", DATA / "fat_point.dga", "--window", "-2..0")
    assert code == 2 and rep["error"]["kind"] == "usage"

def test_cohomology(capsys):
    code, rep, _ = run(capsys, "cohomology", DATA / "fat_point.dga", "--window", "-2..0",
                       "--max-weight", "4")
    reps = [s["representatives"] for s in rep["result"]["slices"] if s["degree"] == 0]
    assert code == 0 and reps == [["1"], ["x"]]

def test_derham(capsys):
    code, rep, _ = run(capsys, "derham", DATA / "line.dga", "--form", "x^2*d(x)",
                       "--max-wedge", "2")
    assert code == 0 and rep["result"]["closed"] and rep["result"]["d"] == "0"

def test_shifted_cotangent(capsys):
    code, rep, _ = run(capsys, "shifted-cotangent", DATA / "line.dga", "--d", "1",
                       "--twist-potential", "1/3*x^3")
    assert code == 0 and rep["result"]["presentation"].endswith("D y_x = x^2;\n")
    assert rep["result"]["verification"]["ok"]

def test_verify_symplectic_exit_codes(capsys):
    common = ["--d", "1", "--window", "-2..1", "--max-polydeg", "3"]
    code, rep, _ = run(capsys, "verify-symplectic", DATA / "crit.dga", "--omega", "d(x)^d(y)",
                       *common)
    assert code == 0 and rep["result"]["method"] == "isomorphism"
    code, rep, _ = run(capsys, "verify-symplectic", DATA / "crit.dga", "--omega", "0", *common)
    assert code == 1 and not rep["result"]["nondegenerate"]

def test_darboux(capsys):
    code, rep, _ = run(capsys, "darboux", DATA / "crit.dga", "--d", "1", "--omega", "d(x)^d(y)",
                       "--witness", DATA / "crit.witness", "--max-wedge", "3",
                       "--window", "-2..1", "--max-polydeg", "4")
    assert code == 0 and rep["result"]["f"] == "1/3*x^3"
    assert rep["result"]["sigma"] == {"x": "x", "y_x": "y"}

def test_omega_from_file(capsys, tmp_path):
    p = tmp_path / "omega.form"
    p.write_text("d(x)^d(y)\n")
    code, rep, _ = run(capsys, "verify-symplectic", DATA / "crit.dga", "--omega", f"@{p}",
                       "--d", "1", "--window", "-2..1", "--max-polydeg", "3")
    assert code == 0 and rep["ok"]

def test_surgery(capsys, tmp_path):
    dga = tmp_path / "t3.dga"
    dga.write_text("field Q;\ngen x : 0;\ngen y : -3;\n")
    wit = tmp_path / "t3.witness"
    wit.write_text("witness over t3 {\n  basis y;\n}\n")
    code, rep, _ = run(capsys, "surgery", dga, "--omega", "d(x)^d(y)", "--d", "3",
                       "--witness", wit, "--window", "-4..1", "--max-polydeg", "2")
    assert code == 0 and rep["result"]["swaps"] == [["d(y)", "d(x)"]]

def test_tor_amplitude(capsys):
    code, rep, _ = run(capsys, "tor-amplitude", DATA / "plane.dga", "--module",
                       DATA / "koszul_plane.mod", "--seed", "1")
    assert code == 0 and rep["result"]["duality_holds"]
    assert rep["result"]["module"]["amplitude"] == [-1, 1]

def test_localize(capsys):
    code, rep, _ = run(capsys, "localize", DATA / "line.dga", "--element", "x")
    assert code == 0 and rep["result"]["presentation"].endswith("D xi_loc = x*t - 1;\n")

def test_output_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["-o", str(out), "cotangent", str(DATA / "line.dga")]) == 0
    assert json.loads(out.read_text())["ok"]

def test_byte_stable():
    args = [sys.executable, "-m", "dshift", "darboux", str(DATA / "crit.dga"), "--d", "1",
            "--omega", "d(x)^d(y)", "--witness", str(DATA / "crit.witness"),
            "--max-wedge", "3", "--window", "-2..1", "--max-polydeg", "4"]
    env = dict(os.environ, PYTHONHASHSEED="0")
    a = subprocess.run(args, capture_output=True, env=env, check=True).stdout
    env["PYTHONHASHSEED"] = "1"
    b = subprocess.run(args, capture_output=True, env=env, check=True).stdout
    assert a == b and a.endswith(b"\n")


def test_module_cohomology(capsys):
    # the Koszul complex on (x1, x2) resolves k
    code, rep, _ = run(capsys, "cohomology", DATA / "plane.dga", "--module",
                       DATA / "koszul_plane.mod", "--window", "-1..1", "--max-polydeg", "2")
    (s,) = rep["result"]["slices"]
    assert code == 0 and s["degree"] == 1 and s["representatives"] == [{"c": "1"}]
