import io
import subprocess
import sys

import pytest

from mcfinite.cli import main

import oracles

FIB_SPEC = "dim 1\ndepth 2\ninit 1\ninit 1\nnext[1] = a[1][1] + a[2][1]\n"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    spec = tmp_path / "fib.prs"
    spec.write_text(FIB_SPEC)
    bfile = tmp_path / "tel.txt"
    bfile.write_text("".join(f"{n} {oracles.telephone(n) + (n == 5)}\n" for n in range(1, 11)))
    wit = tmp_path / "w.txt"
    wit.write_text("empty\nC_3\nC_4\n@out empty\n@1 1:\n")
    return spec, bfile, wit


def test_eval_examples(files):
    spec = str(files[0])
    assert run("eval", "--spec", spec, "--mod", "10", "--n", "10") == (0, "5\n", "")
    assert run("eval", "--spec", spec, "--mod", "1", "--n", "999")[1] == "0\n"
    assert run("eval", "--spec", "fib", "--mod", "7", "--n", "10^18")[1] == \
        f"{oracles.fib_mod_doubling(10 ** 18, 7)}\n"


def test_count_example():
    code, out, _ = run("count", "--property", "cycles", "--n-max", "4")
    lines = out.splitlines()
    assert code == 0 and "3 1" in lines and "4 3" in lines


def test_period_roundtrip(files):
    from mcfinite.periodic import deserialize
    code, out, _ = run("period", "--spec", str(files[0]), "--mod", "5")
    ep = deserialize(out)
    assert code == 0 and ep.preperiod + ep.period <= 26
    assert [ep.lookup(n).value for n in range(1, 40)] == [oracles.fib(n) % 5 for n in range(1, 40)]


def test_falsify_command(files):
    code, out, _ = run("falsify", "--spec", "telephone", "--bfile", str(files[1]), "--moduli", "2..3")
    assert code == 0
    assert out.splitlines()[0] == "MISMATCH n=5 m=2 expected=0 got=1"
    assert out.splitlines()[-1] == "verdict: FALSIFIED"


def test_du_and_subst_from_witness_file(files):
    code, out, _ = run("du-rank", "--property", "connected", "--witnesses", str(files[2]))
    assert code == 0 and "rank 2" in out.splitlines()
    code, out, _ = run("subst-rank", "--property", "connected", "--witnesses", str(files[2]))
    assert code == 0 and any(line.startswith("rank ") for line in out.splitlines())


def test_orbit_check_and_reproducibility():
    first = run("orbit-check", "--trials", "15", "--max-n", "6", "--seed", "11")
    assert first[0] == 0 and first[1].splitlines()[-1] == "passed 15/15 (seed 11)"
    assert run("orbit-check", "--trials", "15", "--max-n", "6", "--seed", "11") == first


def test_recur_and_vanish():
    code, out, _ = run("recur", "--property", "max-degree:1", "--mod", "2", "--degree", "1", "--n-max", "6")
    assert code == 0 and out.splitlines()[-1] == "verified"
    assert all(line.endswith("residual=0") for line in out.splitlines() if line.startswith("D="))
    code, out, _ = run("vanish", "--property", "cycles", "--mod", "2", "--n-max", "7")
    assert code == 0 and out.splitlines()[-1] == "vanishes from n=5"


def test_adversary_command():
    code, out, _ = run("adversary", "--bits", "alternating", "--n", "3")
    assert code == 0
    lines = out.splitlines()
    value = int(lines[0])
    assert value % 8 == 1 and value % 27 == 0 and value % 125 == 1


def test_machine_format():
    code, out, _ = run("--format", "machine", "eval", "--spec", "fib", "--mod", "10", "--n", "10")
    assert out == "n=10 m=10 residue=5\n"
    code, out, _ = run("count", "--format", "machine", "--property", "cycles", "--n-max", "3")
    assert all("=" in tok for line in out.splitlines() for tok in line.split())


def test_jobs_do_not_change_output():
    a = run("count", "--property", "connected", "--n-max", "5")
    b = run("--jobs", "2", "count", "--property", "connected", "--n-max", "5")
    assert a == b


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["eval", "--spec", "fib", "--mod", "2"],
    ["eval", "--spec", "fib", "--mod", "2", "--n", "3", "--unknown"],
    ["count", "--property", "cycles", "--n-max", "x"],
    ["count", "--property", "nonsense", "--n-max", "3"],
    ["eval", "--spec", "fib", "--mod", "0", "--n", "3"],
])
def test_usage_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == "" and err


@pytest.mark.parametrize("argv", [
    ["eval", "--spec", "missing.prs", "--mod", "2", "--n", "3"],
    ["vanish", "--property", "max-degree:1", "--mod", "2", "--n-max", "3"],
    ["falsify", "--spec", "fib", "--bfile", "missing.txt"],
    ["adversary", "--bits", "nope", "--n", "3"],
])
def test_domain_errors_exit_1(argv):
    code, _, err = run(*argv)
    assert code == 1 and err.startswith(f"mcfinite {argv[0]}: error:")


COVERAGE = {
    "period": ["--spec", "fib", "--mod", "3"],
    "eval": ["--spec", "fib", "--mod", "3", "--n", "5"],
    "falsify": ["--spec", "fib", "--bfile", "{bfile}", "--moduli", "2,3"],
    "count": ["--property", "max-degree:1", "--n-max", "3", "--mod", "2"],
    "du-rank": ["--property", "cycles", "--gen-max", "2"],
    "subst-rank": ["--property", "connected", "--gen-max", "2"],
    "orbit-check": ["--trials", "2", "--max-n", "4", "--seed", "0"],
    "recur": ["--property", "max-degree:1", "--mod", "2", "--degree", "1", "--n-max", "4"],
    "vanish": ["--property", "cycles", "--mod", "3", "--n-max", "6"],
    "adversary": ["--bits", "thue-morse", "--n", "3"],
}


@pytest.mark.parametrize("command", sorted(COVERAGE))
def test_every_subcommand_runs_and_is_deterministic(command, files):
    argv = [a.replace("{bfile}", str(files[1])) for a in COVERAGE[command]]
    first = run(command, *argv)
    assert first[0] == 0 and first[1]
    assert run(command, *argv) == first
    machine = run("--format", "machine", command, *argv)
    assert machine[0] == 0 and machine[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mcfinite", "eval", "--spec", "fib", "--mod", "10", "--n", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "5\n"
