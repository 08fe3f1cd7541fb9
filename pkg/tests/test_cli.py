import math
import os
import re
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ewlgame import cli
from ewlgame.cli import GridSpec, RunConfig, config_from_text, main, parse_angle

ERROR_LINE = re.compile(r"^ewlgame: error\[(config|numeric|io|verify)\]: \S.*\n$")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def values(out):
    return {k.strip(): v.strip() for k, v in (line.split("=", 1) for line in out.splitlines() if "=" in line
                                              and not line.startswith(" "))}


def read_csv(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode("ascii").splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


# ---------------------------------------------------------------- angles and specs

@pytest.mark.parametrize("text, value", [
    ("pi/2", math.pi / 2), ("pi/4", math.pi / 4), ("pi/6", math.pi / 6), ("pi/3", math.pi / 3),
    ("3pi/8", 3 * math.pi / 8), ("-0.4", -0.4), ("pi/2+0.4", math.pi / 2 + 0.4), ("2*pi", 2 * math.pi),
    ("1e-3", 1e-3),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == value


@pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "x", "", "1/0", "pi/", "True"])
def test_parse_angle_rejects(text):
    with pytest.raises(cli.CliError) as exc:
        parse_angle(text)
    assert exc.value.kind == "config"


def test_grid_spec():
    assert GridSpec.parse("pi/4", "gamma").is_single
    g = GridSpec.parse("0:pi/2:3", "gamma")
    assert list(g.values()) == [0.0, math.pi / 4, math.pi / 2]
    for bad in ("0:1:1", "0:1", "0:1:x", "0:1:2:3"):
        with pytest.raises(cli.CliError):
            GridSpec.parse(bad, "gamma")


# ---------------------------------------------------------------- config

def test_config_round_trip_example(tmp_path):
    text = "pd = 1,2,4\ngamma = 0:pi/2:11  # sweep\nphases = 0.1,pi/2\ngrid=801\ntol = 1e-8\nout = x.csv\n"
    cfg = config_from_text(text)
    assert cfg.gamma == GridSpec(0.0, math.pi / 2, 11) and cfg.phases == (0.1, math.pi / 2)
    again = config_from_text(cfg.serialize())
    assert again == cfg


configs = st.builds(
    RunConfig,
    pd=st.one_of(st.none(), st.tuples(*[st.floats(-1e6, 1e6)] * 3)),
    gamma=st.one_of(
        st.none(),
        st.floats(0, 1.5).map(lambda v: GridSpec(v, v, 1)),
        st.tuples(st.floats(0, 1), st.floats(0, 1.5), st.integers(2, 500)).map(lambda t: GridSpec(*t)),
    ),
    phases=st.one_of(st.sampled_from(sorted(cli.NAMED_PHASES)), st.tuples(st.floats(-7, 7), st.floats(-7, 7))),
    x=st.one_of(st.none(), st.tuples(st.floats(0, 1), st.floats(0, 1))),
    grid=st.integers(3, 10_000),
    tol=st.floats(1e-15, 1.0),
    seed=st.integers(0, 2 ** 31),
    jobs=st.integers(1, 8),
    out=st.one_of(st.none(), st.from_regex(r"[a-z0-9_./-]{1,20}", fullmatch=True)),
)


@given(configs)
def test_config_round_trip_property(cfg):
    assert config_from_text(cfg.serialize()) == cfg


def test_config_file_and_flag_override(tmp_path, capsys):
    conf = tmp_path / "run.cfg"
    conf.write_text("pd = 1,2,4\ngamma = 0\nphases = trivial\nx = 0,1\ny = 0,1\n")
    code, out, _ = run(capsys, "payoff", "--config", str(conf))
    assert code == 0 and values(out)["quantum_payoff_player1"] == "1"
    code, out, _ = run(capsys, "payoff", "--config", str(conf), "--x", "1,0")
    assert code == 0 and values(out)["classical_payoff"] == "0"
    code, out, _ = run(capsys, "payoff", "--config", str(conf), "--matrix", "5,5,5,5")
    assert code == 0 and values(out)["classical_payoff"] == "5"


@pytest.mark.parametrize("text", ["pd = 1,2,4\nbogus = 3\n", "pd 1,2,4\n", "pd = 1,2,4\nmatrix = 1,2,3,4\n",
                                  "grid = 2\n", "tol = -1\n", "gamma = 0:1:1\n"])
def test_config_file_errors(tmp_path, capsys, text):
    conf = tmp_path / "bad.cfg"
    conf.write_text(text)
    code, _, err = run(capsys, "nash", "--config", str(conf), "--gamma", "0")
    assert code == 2 and ERROR_LINE.match(err)


# ---------------------------------------------------------------- payoff and nash

def test_payoff_examples(capsys):
    code, out, _ = run(capsys, "payoff", "--pd", "1,2,4", "--gamma", "0", "--phases", "trivial",
                       "--x", "0,1", "--y", "0,1")
    v = values(out)
    assert code == 0 and float(v["classical_payoff"]) == 1 and float(v["quantum_payoff_player1"]) == 1
    assert float(v["decomposition_residual"]) < 1e-12
    code, out, _ = run(capsys, "payoff", "--pd", "1,2,4", "--gamma", "pi/2", "--phases", "0,pi/2",
                       "--x", "1,0", "--y", "0,1")
    assert code == 0 and float(values(out)["quantum_payoff_player1"]) == pytest.approx(4.0, abs=1e-12)


def test_payoff_malformed_density(capsys):
    code, out, err = run(capsys, "payoff", "--pd", "1,2,4", "--gamma", "0", "--x", "0.5,0.6", "--y", "0,1")
    assert code == 2 and ERROR_LINE.match(err) and "does not sum to 1" in err


def test_nash_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "nash", "--pd", "1,2,4", "--gamma", "0")
    assert code == 0
    assert "t_star = 1 payoff_classical = 1 payoff_quantum = 1" in out
    v = values(out)
    assert (v["pareto_t"], v["pareto_payoff"], v["coincidence"]) == ("0", "2", "false")

    code, out, _ = run(capsys, "nash", "--pd", "1,2,5", "--gamma", "pi/4", "--phases", "pseudo")
    v = values(out)
    assert float(re.search(r"t_star = (\S+)", out).group(1)) == pytest.approx(0.25, abs=1e-12)
    assert float(re.search(r"payoff_quantum = (\S+)", out).group(1)) == pytest.approx(2.125, abs=1e-12)
    assert v["coincidence"] == "true"

    path = tmp_path / "nash.csv"
    code, out, _ = run(capsys, "nash", "--pd", "2,3,4", "--gamma", "pi/4", "--out", str(path))
    assert code == 0 and v and "equilibria = 2" in out
    header, rows = read_csv(path)
    assert header == list(cli.NASH_HEADER)
    assert [(r["t_star"], r["pareto_dominant"]) for r in rows] == [("0", "true"), ("1", "false")]


def test_nash_needs_single_gamma(capsys):
    code, _, err = run(capsys, "nash", "--pd", "1,2,4", "--gamma", "0:1:3")
    assert code == 2 and ERROR_LINE.match(err)


# ---------------------------------------------------------------- sweeps

def test_sweep_gamma_pd124(tmp_path, capsys):
    path = tmp_path / "gamma.csv"
    code, _, _ = run(capsys, "sweep-gamma", "--pd", "1,2,4", "--phases", "0,pi/2",
                     "--gamma", "0:pi/2:101", "--out", str(path))
    header, rows = read_csv(path)
    assert code == 0 and header == list(cli.GAMMA_SWEEP_HEADER) and len(rows) == 101
    assert rows[0]["gamma"] == "0" and float(rows[0]["t_star"]) == 1 and float(rows[0]["payoff_classical"]) == 1
    assert float(rows[-1]["gamma"]) == math.pi / 2
    for r in rows:  # 17 significant digits round-trip
        assert float(format(float(r["payoff_quantum"]), ".17g")) == float(r["payoff_quantum"])


def test_sweep_gamma_trivial_and_two_points(tmp_path, capsys):
    path = tmp_path / "t.csv"
    run(capsys, "sweep-gamma", "--pd", "2,3,4", "--phases", "trivial", "--gamma", "0:pi/2:6",
        "--grid", "401", "--out", str(path))
    _, rows = read_csv(path)
    assert len({(r["t_star"], r["payoff_classical"], r["branch"]) for r in rows}) == 1
    q = [float(r["payoff_quantum"]) for r in rows]
    assert max(q) - min(q) < 1e-12
    run(capsys, "sweep-gamma", "--pd", "1,2,4", "--gamma", "0:pi/2:2", "--out", str(path))
    _, rows = read_csv(path)
    assert len(rows) == 2


def test_sweep_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep-gamma", "--pd", "1,2,4", "--gamma", "0:pi/2:21", "--grid", "801"]
    run(capsys, *args, "--out", str(a))
    run(capsys, *args, "--out", str(b), "--jobs", "3")
    assert a.read_bytes() == b.read_bytes()


def test_sweep_unwritable_path(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = run(capsys, "sweep-gamma", "--pd", "1,2,4", "--gamma", "0:pi/2:3", "--out", str(target))
    assert code == 4 and ERROR_LINE.match(err)
    assert not target.exists() and not (tmp_path / "missing").exists()


def test_sweep_write_failure_leaves_no_partial_file(tmp_path, monkeypatch, capsys):
    target = tmp_path / "out.csv"

    def boom(src, dst):
        raise OSError(28, "No space left on device")

    monkeypatch.setattr(cli.os, "replace", boom)
    code, _, err = run(capsys, "sweep-gamma", "--pd", "1,2,4", "--gamma", "0:pi/2:3", "--out", str(target))
    assert code == 4 and ERROR_LINE.match(err)
    assert list(tmp_path.iterdir()) == []


def test_sweep_requires_out(capsys):
    code, _, err = run(capsys, "sweep-gamma", "--pd", "1,2,4")
    assert code == 2 and ERROR_LINE.match(err)


def test_sweep_phases(tmp_path, capsys):
    path = tmp_path / "p.csv"
    code, _, _ = run(capsys, "sweep-phases", "--pd", "1,2,4", "--xi0", "0", "--xi1", "pi/2",
                     "--gamma", "pi/3", "--out", str(path))
    header, rows = read_csv(path)
    assert code == 0 and header == list(cli.PHASE_SWEEP_HEADER) and len(rows) == 1
    assert float(rows[0]["payoff_classical"]) == pytest.approx(float(rows[0]["payoff_quantum"]), abs=1e-8)

    run(capsys, "sweep-phases", "--pd", "1,2,4", "--xi0", "-0.1:0.1:3", "--xi1", "-0.1:0.1:3",
        "--gamma", "0:pi/2:3", "--grid", "401", "--out", str(path))
    _, rows = read_csv(path)
    assert len(rows) == 27
    order = [(float(r["xi0"]), float(r["xi1"]), float(r["gamma"])) for r in rows]
    assert order == sorted(order)
    origin = [r for r in rows if float(r["xi0"]) == 0 and float(r["xi1"]) == 0]
    assert len(origin) == 3
    for r in origin:
        assert float(r["t_star"]) == 1 and float(r["payoff_quantum"]) == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- verify

def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith(("PASS", "FAIL"))]
    assert lines and all(line.startswith("PASS") for line in lines)
    identity = [float(re.search(r"residual=(\S+)", line).group(1)) for line in lines
                if "oracle" not in line]
    assert max(identity) < 1e-10


def test_verify_fault_injection(capsys):
    code, out, err = run(capsys, "verify", "--inject-fault", "--samples", "50")
    assert code == 1 and ERROR_LINE.match(err) and "decomposition_equivalence" in err
    assert re.search(r"^FAIL decomposition_equivalence", out, re.M)


@pytest.mark.parametrize("seed", range(10))
def test_verify_seed_robust(capsys, seed):
    code, _, _ = run(capsys, "verify", "--seed", str(seed), "--samples", "200")
    assert code == 0


# ---------------------------------------------------------------- failure paths

@pytest.mark.parametrize("argv, code", [
    ([], 2),
    (["frobnicate"], 2),
    (["nash", "--gamma", "0"], 2),
    (["nash", "--pd", "2,1,3", "--gamma", "0"], 2),
    (["nash", "--pd", "1,2", "--gamma", "0"], 2),
    (["nash", "--pd", "1,2,4", "--gamma", "2"], 2),
    (["nash", "--pd", "1,2,4", "--gamma", "pi/4", "--phases", "weird"], 2),
    (["nash", "--pd", "1,2,4", "--matrix", "1,2,3,4", "--gamma", "0"], 2),
    (["nash", "--matrix", "1,2,3,nan", "--gamma", "0"], 2),
    (["nash", "--pd", "1,2,4", "--gamma", "0", "--config", "/nonexistent.cfg"], 2),
    (["nash", "--pd", "1,2,4", "--gamma", "0", "--grid", "abc"], 2),
    (["nash", "--matrix=-1.7e308,0,1.7e308,0", "--gamma", "0"], 3),
])
def test_error_paths(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert ERROR_LINE.match(err), err


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ewlgame", "nash", "--pd", "1,2,5", "--gamma", "pi/4"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "coincidence = true" in out.stdout
    bad = subprocess.run([sys.executable, "-m", "ewlgame", "payoff", "--pd", "1,2,4"],
                         capture_output=True, text=True)
    assert bad.returncode == 2 and ERROR_LINE.match(bad.stderr)
    helped = subprocess.run([sys.executable, "-m", "ewlgame", "--help"], capture_output=True, text=True)
    assert helped.returncode == 0 and "sweep-gamma" in helped.stdout
