import subprocess
import sys
from pathlib import Path


from netrw.cli import main
from netrw.corpus import chain
from netrw.jungle import Jungle
from netrw.textio import parse_jungle, parse_td

DATA = Path(__file__).resolve().parent.parent / "scripts" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nf_happy_path(capsys):
    code, out, _ = run(capsys, "nf", "--rules", DATA / "abc.rns", "--in", DATA / "start.nets")
    assert code == 0
    assert parse_jungle(out) == Jungle.of(chain("c"), chain("cc"))


def test_outputs_repeat_byte_for_byte(capsys):
    argv = ["rewrite", "--rules", DATA / "abc.rns", "--in", DATA / "start.nets", "--steps", "2"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "nf", "--bogus")
    assert code == 2 and "netrw" in err


def test_parse_error_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.nets"
    bad.write_text("netrw-nets v1\nedge v.ou1 -> v.in1\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "line 2" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "nf", "--rules", tmp_path / "none.rns", "--in", DATA / "start.nets")
    assert code == 2 and "cannot read" in err


def test_validate_all_samples(capsys):
    files = sorted(DATA.iterdir())
    code, out, _ = run(capsys, "validate", *files)
    assert code == 0 and out.count("ok ") == len(files)


def test_td_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "td", "compose", DATA / "ab.td", DATA / "bc.td")
    assert code == 0
    composed = tmp_path / "abc.td"
    composed.write_text(out)
    assert len(parse_td(out).carrier) == 2
    code, out, _ = run(capsys, "td", "run", composed, "--in", DATA / "mothers.nets")
    assert code == 0 and parse_jungle(out) == Jungle.of(chain("c"))


def test_solve_and_evolve(capsys):
    code, out, _ = run(capsys, "solve", "--problem", DATA / "a_to_c.prob", "--td", DATA / "ab.td", "--td", DATA / "bc.td")
    assert code == 0 and "solution depth=2 path=ab.bc" in out
    argv = ["evolve", "--mothers", DATA / "mothers.nets", "--td", DATA / "ab.td", "--td", DATA / "bc.td",
            "--problem", DATA / "a_to_c.prob"]
    code, first, _ = run(capsys, *argv)
    assert code == 0 and first.startswith("level=0")
    assert run(capsys, *argv)[1] == first


def test_nbh_and_compile(capsys):
    code, out, _ = run(capsys, "nbh", "apply", "--nbh", DATA / "relabel.nbh", "--in", DATA / "pair.nets")
    assert code == 0 and parse_jungle(out) == Jungle.of(chain("cd"), chain("dc"))
    code, out, _ = run(capsys, "nbh", "classify", "--nbh", DATA / "relabel.nbh", "--in", DATA / "pair.nets")
    assert "ESNBH" in out.split()
    code, out, _ = run(capsys, "compile", "nbh2rns", DATA / "relabel.nbh")
    assert code == 0 and out.startswith("netrw-rns v1")


def test_checks_from_command_line(capsys):
    code, out, _ = run(capsys, "check", "uprns-validator")
    assert code == 0 and out.startswith("PASS uprns-validator")
    code, _, err = run(capsys, "check", "no-such-check")
    assert code == 2


def test_failed_comparison_exit_code(capsys):
    code, out, _ = run(capsys, "sisters", "--in", DATA / "start.nets", "--kind", "PRNS")
    assert code == 1 and out.startswith("not sisters")


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("NETRW_BUDGET", "1,6,2000")
    code, out, _ = run(capsys, "nf", "--rules", DATA / "abc.rns", "--in", DATA / "start.nets")
    assert code == 0
    monkeypatch.setenv("NETRW_BUDGET", "x")
    assert run(capsys, "nf", "--rules", DATA / "abc.rns", "--in", DATA / "start.nets")[0] == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "netrw.cli", "orn", "--in", str(DATA / "pair.nets")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "net0 orn=2\nnet1 orn=2\n"


def test_td_run_without_input(capsys):
    code, _, err = run(capsys, "td", "run", DATA / "ab.td")
    assert code == 2 and "--in" in err
