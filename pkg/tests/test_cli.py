import json
import subprocess
import sys

from bcl.cli import EXIT_CAP, EXIT_PRECONDITION, EXIT_USAGE, main, parse_scale
from fractions import Fraction


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_mahler_golden(capsys):
    code, rep = run(capsys, "mahler", "--poly", "-1,-1,1")
    assert code == 0 and rep["schema"] == "bcl/1"
    assert rep["result"]["approx"].startswith("1.6180339887")
    assert "threads" not in rep["manifest"]["flags"]


def test_scale_literals():
    assert parse_scale("n^-3n", 12) == Fraction(1, 12 ** 36)
    assert parse_scale("12^-36") == Fraction(1, 12 ** 36)
    assert parse_scale("1/8") == Fraction(1, 8)


def test_approx_dichotomy_golden(capsys):
    code, rep = run(capsys, "approx", "--lambda-minpoly", "-1,1,1", "--lambda-isolator", "0.5,1",
                    "--n", "6", "--r", "n^-3n")
    assert code == 0
    assert rep["result"]["kind"] == "approximation"
    assert rep["result"]["certificate"]["eta_equals_lambda"] is True


def test_approx_collisions_with_interval(capsys):
    code, rep = run(capsys, "approx", "--lambda-interval", "0.6,0.6", "--n", "6", "--r", "1/50",
                    "--mode", "collisions", "--pairs")
    assert code == 0 and rep["result"]["pairs"] is not None


def test_garsia_and_dim_bound(capsys, tmp_path):
    code, rep = run(capsys, "garsia", "--minpoly", "-1,1,1", "--isolator", "0.5,1", "--n-max", "8",
                    "--cache-dir", str(tmp_path))
    assert code == 0 and rep["result"]["semantics"] == "upper-bound-only"
    code, rep = run(capsys, "cache", "list", "--cache-dir", str(tmp_path))
    assert code == 0 and len(rep["result"]["entries"]) == 4
    code, rep = run(capsys, "cache", "verify", "--cache-dir", str(tmp_path))
    assert code == 0
    code, rep = run(capsys, "dim-bound", "--minpoly", "-1,2", "--isolator", "0.5,0.5", "--n", "8")
    assert code == 0 and rep["result"]["dim_upper"] == {"lo": "1*2^0", "hi": "1*2^0"}
    code, rep = run(capsys, "cache", "clear", "--cache-dir", str(tmp_path))
    assert rep["result"]["removed"] == 4


def test_entropy_from_atom_file(capsys, tmp_path):
    f = tmp_path / "atoms.csv"
    f.write_text("0,1/2\n1/2,1/2\n")
    code, rep = run(capsys, "entropy", "--atoms", str(f), "--r", "1", "--method", "both")
    assert code == 0 and rep["result"]["methods_agree"]
    assert rep["manifest"]["input_hashes"]["atoms"]


def test_bezout_and_audits(capsys):
    code, rep = run(capsys, "bezout", "--polys", "-1,1,1;0,-1,1,1", "--n", "4")
    assert code == 0 and rep["result"]["gcd"] == "-1,1,1"
    code, rep = run(capsys, "audit", "jensen", "--degree", "4", "--k-max", "2")
    assert code == 0 and rep["result"]["verdict"]
    code, rep = run(capsys, "audit", "separation", "--degree", "3")
    assert code == 0


def test_props(capsys):
    code, rep = run(capsys, "props", "--seed", "1", "--cases", "10")
    assert code == 0 and len(rep["result"]["checks"]) == 8 and rep["result"]["failures"] == []


def test_exit_codes(capsys):
    assert run(capsys, "mahler", "--poly", "0")[0] == EXIT_PRECONDITION
    assert run(capsys, "approx", "--lambda", "1/2", "--n", "4", "--r", "1/10")[0] == EXIT_PRECONDITION
    assert run(capsys, "approx", "--n", "4")[0] == EXIT_USAGE
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "mahler", "--poly", "1,x")[0] == EXIT_USAGE
    assert run(capsys, "garsia", "--minpoly", "-1,2", "--isolator", "0.5,0.5", "--n-max", "16",
               "--support-cap", "1000")[0] == EXIT_CAP


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BCL_PRECISION", "96")
    code, rep = run(capsys, "mahler", "--poly", "-2,1")
    assert rep["manifest"]["precision"] == 96
    code, rep = run(capsys, "mahler", "--poly", "-2,1", "--precision", "80")
    assert rep["manifest"]["precision"] == 80


def test_console_script_is_wired():
    out = subprocess.run([sys.executable, "-m", "bcl.cli", "mahler", "--poly", "-2,1"],
                         capture_output=True, text=True, check=True)
    rep = json.loads(out.stdout)
    assert float(rep["result"]["approx"]) == 2.0
    assert "wall time" in out.stderr
