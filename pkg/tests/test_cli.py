"""CLI surface: subcommands, exit codes, config handling, CSV schemas,
byte-level determinism, and SVG emission."""

import json
import math
import os

import pytest

from fbandit.cli import main
from fbandit.config import ExperimentConfig, parse_arm
from fbandit.errors import ConfigError

U = None


def run(args):
    return main(args)


def write_config(tmp_path, name="cfg.json", **kw):
    path = tmp_path / name
    path.write_text(json.dumps(kw), encoding="utf-8")
    return str(path)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture
def pm_csv(tmp_path):
    p = tmp_path / "pm.csv"
    p.write_text("arm_id,outcome\na,0.3\na,0.3\n", encoding="utf-8")
    return str(p)


# ---------------------------------------------------------------------------
# config plumbing

def test_config_round_trip_identity():
    cfg = ExperimentConfig(functional="mean", policies=["fucb:beta=2.5"],
                           grid="paper11", n=123, reps=4, seed=9)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert ExperimentConfig.from_dict(again.to_dict()).to_dict() == cfg.to_dict()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown config key"):
        ExperimentConfig.from_dict({"functonal": "mean"})


def test_seed_fallback_env(monkeypatch):
    cfg = ExperimentConfig()
    monkeypatch.setenv("FB_SEED", "777")
    assert cfg.resolved_seed() == 777
    monkeypatch.delenv("FB_SEED")
    assert cfg.resolved_seed() == 0
    cfg.seed = 5
    assert cfg.resolved_seed() == 5


def test_parse_arm_forms(tmp_path):
    sup = ExperimentConfig().support_interval()
    assert parse_arm({"beta": [1, 3]}, sup).shape2 == 3.0
    assert parse_arm({"point": 0.4}, sup).c == 0.4
    d = parse_arm({"discrete": {"values": [0, 1], "probs": [0.5, 0.5]}}, sup)
    assert d.mean == 0.5
    with pytest.raises(ConfigError):
        parse_arm({"data": {"path": str(tmp_path / "missing.csv"), "arm": "a"}}, sup)
    with pytest.raises(ConfigError):
        parse_arm({"zeta": 1}, sup)


# ---------------------------------------------------------------------------
# scalar subcommands

def test_samplesize_values(capsys):
    assert run(["samplesize", "etc-es", "--c", "2", "--delta", "0.3", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "524"
    assert run(["samplesize", "etc-t", "--c", "2", "--delta", "0.3"]) == 0
    assert capsys.readouterr().out.strip() == "2624"


def test_bound_values(capsys):
    beta = 2.0 + math.sqrt(2.0)
    assert run(["bound", "fucb", "--beta", str(beta), "--c", "2", "--k", "2",
                "--n", "10000"]) == 0
    out = capsys.readouterr().out
    val = float(out.split()[0].split("=")[1])
    exact = 2 * math.sqrt(5 + 4 * math.sqrt(2)) * math.sqrt(2e4 * math.log(1e4))
    assert val == pytest.approx(exact, rel=1e-12)
    assert val <= math.sqrt(11) * 2 * math.sqrt(2e4 * math.log(1e4))
    assert run(["bound", "hpb", "--beta", "2.01", "--c", "2", "--n", "10000",
                "--deltas", "0.1", "--x", "1"]) == 0
    out = capsys.readouterr().out
    assert float(out.split()[0].split("=")[1]) == pytest.approx(1481.12, abs=0.01)


def test_bound_numeric_error_exit_code(capsys):
    assert run(["bound", "fucb", "--beta", "1.5", "--c", "2", "--n", "100"]) == 4


def test_eval_point_mass(pm_csv, capsys):
    assert run(["eval", "--functional", "gini-welfare", "--data", pm_csv]) == 0
    arm, val = capsys.readouterr().out.split()
    assert arm == "a"
    assert float(val) == pytest.approx(0.3)


def test_eval_missing_file_is_data_error(capsys):
    assert run(["eval", "--functional", "mean", "--data", "/nonexistent.csv"]) == 3


def test_eval_bad_functional_is_config_error(capsys):
    assert run(["eval", "--functional", "giny", "--data", "x.csv"]) == 2


def test_ci_output(pm_csv, capsys):
    assert run(["ci", "--functional", "mean", "--data", pm_csv, "--alpha", "0.1"]) == 0
    out = capsys.readouterr().out
    hw = float(out.split("half_width=")[1].split()[0])
    assert hw == pytest.approx(math.sqrt(math.log(20.0) / 4.0), rel=1e-12)


def test_ingest_roundtrip(tmp_path, capsys):
    src = tmp_path / "raw.csv"
    src.write_text("arm_id,outcome\na,1\na,52\n", encoding="utf-8")
    out = tmp_path / "scaled.csv"
    assert run(["ingest", "--input", str(src), "--transform", "duration:52",
                "--output", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "arm_id,outcome"
    assert "a,0" in text and "a,1" in text


# ---------------------------------------------------------------------------
# experiment subcommands

def test_simulate_row_count(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        functional="mean",
        policies=["fucb:beta=2.01"],
        arms=[{"point": 0.2}, {"point": 0.8}],
        n=100,
        reps=2,
        seed=4,
        outdir=str(tmp_path / "out"),
    )
    assert run(["simulate", "--config", cfg]) == 0
    lines = read(tmp_path / "out" / "trajectory.csv").decode().strip().splitlines()
    # header + reps * |checkpoints| rows ({1,2,...,64,100} -> 8 checkpoints)
    assert lines[0] == "policy,instance,rep,t,regret"
    assert len(lines) == 1 + 2 * 8


def test_simulate_rerun_byte_identical(tmp_path):
    kw = dict(
        functional="gini-welfare",
        policies=["fucb:beta=2.01", "famoss:beta=0.2506265664160401"],
        grid=[0.5, 1.0],
        n=60,
        reps=2,
        seed=11,
    )
    cfg1 = write_config(tmp_path, "a.json", outdir=str(tmp_path / "o1"), **kw)
    cfg2 = write_config(tmp_path, "b.json", outdir=str(tmp_path / "o2"), **kw)
    assert run(["simulate", "--config", cfg1]) == 0
    assert run(["simulate", "--config", cfg2]) == 0
    assert read(tmp_path / "o1" / "trajectory.csv") == read(tmp_path / "o2" / "trajectory.csv")


def test_sweep_workers_byte_identical(tmp_path):
    kw = dict(
        functional="gini-welfare",
        policies=["fucb:beta=2.01"],
        grid=[0.5, 1.0, 2.0],
        n=80,
        reps=2,
        seed=3,
        oracle_grid=2000,
    )
    cfg1 = write_config(tmp_path, "w1.json", outdir=str(tmp_path / "w1"), workers=1, **kw)
    cfg2 = write_config(tmp_path, "w2.json", outdir=str(tmp_path / "w2"), workers=2, **kw)
    assert run(["sweep", "--config", cfg1]) == 0
    assert run(["sweep", "--config", cfg2]) == 0
    assert read(tmp_path / "w1" / "maxregret.csv") == read(tmp_path / "w2" / "maxregret.csv")


def test_sweep_schema_and_svg(tmp_path):
    cfg = write_config(
        tmp_path,
        functional="mean",
        policies=["fucb:beta=2.01", "etc-horizon:explore=cyclic"],
        arms=[{"point": 0.2}, {"point": 0.8}],
        n=50,
        reps=1,
        seed=0,
        outdir=str(tmp_path / "out"),
    )
    assert run(["sweep", "--config", cfg, "--svg", "plot.svg", "--logx"]) == 0
    lines = read(tmp_path / "out" / "maxregret.csv").decode().strip().splitlines()
    assert lines[0] == "policy,t,max_expected_regret,argmax_instance"
    svg = read(tmp_path / "out" / "plot.svg").decode()
    assert svg.count("<polyline") == 2
    assert svg.startswith("<svg")


def test_sweep_empty_policies_is_config_error(tmp_path, capsys):
    cfg = write_config(
        tmp_path, functional="mean", policies=[],
        arms=[{"point": 0.2}, {"point": 0.8}], n=10, reps=1,
        outdir=str(tmp_path / "out"),
    )
    assert run(["sweep", "--config", cfg]) == 2


def test_table1_single_cell(tmp_path):
    cfg = write_config(
        tmp_path,
        grid=[0.5, 2.0],
        reps=2,
        seed=8,
        oracle_grid=2000,
        ns=[50],
        functionals=["gini-welfare"],
        outdir=str(tmp_path / "out"),
    )
    assert run(["table1", "--config", cfg]) == 0
    lines = read(tmp_path / "out" / "table.csv").decode().strip().splitlines()
    assert lines[0] == "functional,n,ratio"
    assert len(lines) == 2
    name, n, ratio = lines[1].split(",")
    assert name == "gini-welfare" and n == "50"
    assert float(ratio) > 0


def test_simulate_preset_paper21_enumerates_210_instances(tmp_path):
    cfg = write_config(
        tmp_path,
        functional="mean",
        policies=["etc-horizon:explore=cyclic"],
        n=8,
        reps=1,
        seed=0,
        oracle_grid=1000,
        outdir=str(tmp_path / "out"),
    )
    assert run(["simulate", "--config", cfg, "--preset", "paper21"]) == 0
    lines = read(tmp_path / "out" / "trajectory.csv").decode().strip().splitlines()
    instances = {line.split(",")[1] for line in lines[1:]}
    assert len(instances) == 210
    # checkpoints for n = 8 are {1, 2, 4, 8}
    assert len(lines) == 1 + 210 * 4


def test_config_missing_arms_and_grid(tmp_path):
    cfg = write_config(tmp_path, functional="mean", policies=["fucb:beta=2.01"],
                       n=10, reps=1, outdir=str(tmp_path / "out"))
    assert run(["simulate", "--config", cfg]) == 2
