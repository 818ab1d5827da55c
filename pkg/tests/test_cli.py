import subprocess
import sys

import pytest

from modcheck import kit
from modcheck.cli import main
from conftest import FIXTURES

NEGATIVE = sorted(p.stem for p in FIXTURES.glob("neg_*.mdk"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_bundled_file(capsys):
    n = len(kit.get("minimal_modulo").parse())
    code, out, err = run(capsys, "check", "theories/minimal_modulo.mdk")
    assert (code, out, err) == (0, f"OK theories/minimal_modulo.mdk ({n} entries)\n", "")


def test_check_several_files(capsys, monkeypatch):
    monkeypatch.chdir(FIXTURES)
    code, out, _ = run(capsys, "check", "cross_t1.mdk", "cross_t2.mdk", "vec.mdk")
    assert code == 0
    assert out.splitlines() == ["OK cross_t1.mdk (8 entries)", "OK cross_t2.mdk (7 entries)", "OK vec.mdk (14 entries)"]


def test_eval_term(capsys):
    code, out, _ = run(capsys, "eval", "theories/nat_t.mdk", "--term", "plus (S (S 0)) (S (S 0))")
    assert (code, out) == (0, "S (S (S (S 0)))\n")


def test_eval_file_commands(capsys):
    code, out, _ = run(capsys, "eval", "nat_t")
    assert (code, out) == (0, "S (S (S (S 0)))\nS (S 0)\n")


def test_eval_ill_typed_term(capsys):
    code, _, err = run(capsys, "eval", "nat_t", "--term", "S S")
    assert code == 1
    assert "TypeMismatch" in err


def test_eval_term_parse_error(capsys):
    code, _, err = run(capsys, "eval", "nat_t", "--term", "S (0")
    assert code == 2
    assert "SyntaxError" in err


def test_missing_file_is_usage_error(capsys):
    code, out, err = run(capsys, "check", "nosuchfile.mdk")
    assert code == 3
    assert out == ""
    assert "nosuchfile.mdk" in err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["check"],
    ["compare", "nat_t"],
    ["compare", "nat_t", "nat_t", "stt"],
    ["deps", "nat_t"],
    ["deps", "nat_t", "plus", "--term", "plus"],
    ["check", "nat_t", "--fuel", "0"],
    ["check", "nat_t", "--fuel", "lots"],
    ["check", "nat_t", "-t"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 3
    assert out == ""
    assert err.startswith("usage error:")


def test_deps_command(capsys):
    code, out, _ = run(capsys, "deps", "nat_t", "plus")
    assert code == 0
    assert out == "root plus\nmode direct\nconst 0\nconst S\nconst nat\nconst plus\nrule plus 0\nrule plus 1\n"
    code, out, _ = run(capsys, "deps", "minimal_modulo", "example", "--transitive")
    assert out.splitlines()[:2] == ["root example", "mode transitive"]
    assert "rule eps 0" in out.splitlines()


def test_deps_term(capsys):
    code, out, _ = run(capsys, "deps", "nat_t", "--term", "S 0")
    assert code == 0
    assert out == "root S 0\nmode direct\nconst 0\nconst S\nconst nat\n"


def test_deps_unknown_name(capsys):
    code, _, err = run(capsys, "deps", "nat_t", "times")
    assert code == 1
    assert "UnknownName" in err


def test_compare_command(capsys, monkeypatch):
    code, out, _ = run(capsys, "compare", "nat_t", "nat_t")
    assert (code, out) == (0, "EQUAL\n")
    monkeypatch.chdir(FIXTURES)
    code, out, _ = run(capsys, "compare", "cross_t1.mdk", "cross_t2.mdk")
    assert code == 0
    assert out == (
        "COMPATIBLE\nleft-only axB\nleft-only eps#0\nleft-only p1\nright-only axA\nright-only p2\n"
    )


def test_compare_conflict_still_succeeds(capsys):
    code, out, _ = run(capsys, "compare", "nat_axiomatic", "nat_t")
    assert code == 0
    assert out.startswith("CONFLICT\n")


def test_bundle_commands(capsys):
    code, out, _ = run(capsys, "bundle-list")
    assert code == 0
    assert [l.split("\t")[0] for l in out.splitlines()] == [t.name for t in kit.bundle()]
    code, out, _ = run(capsys, "bundle-check")
    assert code == 0
    assert [l.split()[:2] for l in out.splitlines()] == [["OK", t.name] for t in kit.bundle()]


@pytest.mark.parametrize("name", NEGATIVE)
def test_negative_golden(capsys, monkeypatch, name):
    monkeypatch.chdir(FIXTURES)
    message, status = (FIXTURES / f"{name}.expected").read_text().splitlines()
    code, out, err = run(capsys, "check", f"{name}.mdk")
    assert err == message + "\n"
    assert f"exit {code}" == status
    assert out == ""


def test_fuel_flag(capsys):
    code, _, err = run(capsys, "eval", "nat_t", "--fuel", "3", "--term", "plus (S (S 0)) (S (S 0))")
    assert code == 4
    assert "FuelExhausted" in err
    assert "3 steps" in err


def test_trace(capsys, monkeypatch):
    monkeypatch.chdir(FIXTURES)
    code, out, err = run(capsys, "eval", "trimmed_nat_t_eval.mdk", "--trace", "--term", "plus (S 0) 0")
    assert (code, out) == (0, "S 0\n")
    steps = [l for l in err.splitlines() if l.startswith("STEP ")]
    assert steps == ["STEP 1: plus : S (plus 0 0)", "STEP 2: plus : 0"]


def test_trace_beta(capsys, monkeypatch):
    monkeypatch.chdir(FIXTURES)
    code, _, err = run(capsys, "eval", "trimmed_nat_t_eval.mdk", "--trace", "--term", "(x : nat => S x) 0")
    assert code == 0
    assert err.splitlines() == ["STEP 1: beta : S 0"]


def test_output_is_deterministic():
    argv = [sys.executable, "-m", "modcheck", "compare", "minimal_axiomatic", "minimal_modulo"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert first.startswith(b"COMPATIBLE\n")


def test_console_script_exit_codes(tmp_path):
    bad = tmp_path / "bad.mdk"
    bad.write_bytes(b"\xff\xfe")
    r = subprocess.run([sys.executable, "-m", "modcheck", "check", str(bad)], capture_output=True, text=True)
    assert r.returncode == 3
    deep = tmp_path / "deep.mdk"
    deep.write_text("A : Type.\nx : " + "(" * 3000 + "A" + ")" * 3000 + ".\n")
    r = subprocess.run([sys.executable, "-m", "modcheck", "check", str(deep)], capture_output=True, text=True)
    assert r.returncode in (0, 1)
    assert "Traceback" not in r.stderr
