import subprocess
import sys

import pytest

from orbitstar.cli import main, run_command
from orbitstar.lie import catalog


def run(*argv):
    return run_command(list(argv))


def test_star_mul_example():
    code, out, err = run("star-mul", "--product", "S", "--algebra", "su2", "x", "y")
    assert (code, out, err) == (0, "x*y + 1/2*h*z", "")


def test_tangential_witness():
    code, out, _ = run("verify", "--property", "tangential", "--product", "S",
                       "--algebra", "su2", "--c0", "1")
    assert code == 1
    line = [l for l in out.splitlines() if not l.startswith("#")][0]
    assert line.split("\t") == ["tangential", "FAIL", "-1/3*h^2*x"]
    assert out.splitlines()[0] == "# seed=0"


def test_check_algebra():
    assert run("check-algebra", "su3")[0] == 0


def test_check_algebra_corrupted(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: bad\ndim: 3\nbrackets:\n  - 1 2 -> 3 1\ninvariants:\n  - x1\n")
    code, out, err = run("check-algebra", str(bad))
    assert code == 1 and out.startswith("algebra\tFAIL\t") and not err


@pytest.mark.parametrize("argv", [
    ["star-mul", "--algebra", "su2", "x^", "y"],
    ["star-mul", "--algebra", "nope", "x", "y"],
    ["verify", "--property", "bogus", "--algebra", "su2"],
    ["orbit-reduce", "--algebra", "su2", "--c0", "1,2", "x"],
    [],
])
def test_usage_errors_exit_2(argv):
    code, _, err = run_command(argv)
    assert code == 2 and err


def test_orbit_reduce_and_round_trip():
    A = catalog("su2")
    code, out, _ = run("orbit-reduce", "--algebra", "su2", "--c0", "1", "z^2")
    assert code == 0
    assert A.parse(out) == A.parse("1 - x^2 - y^2")
    for argv in (["star-mul", "--algebra", "su2", "--product", "P", "--ch", "1+h", "x*z", "y^2"],
                 ["star-mul", "--algebra", "su2", "--product", "K2", "x^2", "y*z"],
                 ["star-mul", "--algebra", "heisenberg", "x1^2", "x2^2"]):
        code, out, _ = run_command(argv)
        assert code == 0
        B = catalog(argv[2])
        assert B.format(B.parse(out)) == out


@pytest.mark.parametrize("argv", [
    ["verify", "--property", "assoc", "--algebra", "su2", "--cases", "5"],
    ["verify", "--property", "first-order", "--algebra", "heisenberg", "--product", "K2"],
    ["verify", "--property", "equivalence", "--algebra", "su2", "--product", "P"],
    ["verify", "--property", "eta-generators", "--algebra", "su2", "--product", "P", "--ch", "1+h"],
    ["glue-verify", "--fixture", "two-chart", "--check", "cocycle", "--points", "5"],
    ["glue-verify", "--fixture", "foliated-r4", "--check", "tangential", "--points", "5"],
])
def test_passing_commands(argv):
    code, out, err = run_command(argv)
    assert code == 0, out + err
    assert "\tPASS\t" in out


def test_failing_glue_check():
    code, out, _ = run("glue-verify", "--fixture", "three-chart-perturbed", "--check",
                       "cocycle", "--points", "5")
    assert code == 1 and "cocycle\tFAIL\t" in out


def test_determinism_and_seed(monkeypatch):
    argv = ["verify", "--property", "assoc", "--algebra", "heisenberg", "--cases", "3"]
    assert run_command(argv) == run_command(argv)
    monkeypatch.setenv("ORBITSTAR_SEED", "17")
    code, out, _ = run_command(argv)
    assert out.startswith("# seed=17")
    assert run_command(argv + ["--seed", "4"])[1].startswith("# seed=4")
    monkeypatch.setenv("ORBITSTAR_SEED", "abc")
    assert run_command(argv)[0] == 2


def test_main_prints(capsys):
    assert main(["star-mul", "--algebra", "su2", "x", "y"]) == 0
    assert capsys.readouterr().out == "x*y + 1/2*h*z\n"


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "orbitstar.cli", "check-algebra", "su2"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "algebra\tPASS" in p.stdout
