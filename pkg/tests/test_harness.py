import csv
import json
import os

import numpy as np
import pytest

from sphereshock import cli
from sphereshock.config import ConfigError, ExperimentConfig, print_defaults
from sphereshock.equivariant import SolverConfig
from sphereshock.harness import load_snapshots, run_experiment, sweep
from sphereshock.records import RunRecord, config_hash, write_field_csv


def small_config(tmp, **solver_overrides):
    solver = dict(n_cells=1024, tau0=1e-2, record_every=8,
                  blowup_slope_cap=300.0, emit_selfsim_ds=0.4)
    solver.update(solver_overrides)
    return ExperimentConfig.from_dict({"solver": solver,
                                       "out_dir": str(tmp)})


def test_record_roundtrip(tmp_path):
    rec = RunRecord(config={"solver": {"tau0": 1e-2}})
    rec.add_sample(t_tilde=0.0, max_slope=100.0)
    rec.add_sample(t_tilde=1e-4, max_slope=110.0)
    rec.status = "blew_up"
    path = tmp_path / "run.jsonl"
    rec.write_jsonl(path)
    back = RunRecord.read_jsonl(path)
    assert back.status == "blew_up"
    assert back.config == {"solver": {"tau0": 1e-2}}
    assert np.allclose(back.series("max_slope"), [100.0, 110.0])


def test_record_requires_increasing_time():
    rec = RunRecord(config={})
    rec.add_sample(t_tilde=0.5)
    with pytest.raises(ValueError):
        rec.add_sample(t_tilde=0.5)


def test_field_csv_columns(tmp_path):
    path = tmp_path / "fields.csv"
    write_field_csv(path, np.array([0.0, 0.1]), np.array([1.0, 1.2]),
                    np.array([-1.0, -1.1]))
    rows = list(csv.DictReader(open(path)))
    assert list(rows[0].keys()) == ["theta_tilde", "w", "z", "sigma", "v"]
    assert float(rows[1]["sigma"]) == pytest.approx(1.15)


def test_config_hash_stable():
    a = config_hash({"x": 1, "y": [1, 2]})
    b = config_hash({"y": [1, 2], "x": 1})
    assert a == b and len(a) == 12


def test_experiment_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"solver": {"nonsense_key": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"modulation": {"tracker": "psychic"}})
    cfg = ExperimentConfig.from_dict({"solver": {"tau0": 5e-3}})
    assert cfg.solver.tau0 == 5e-3
    assert cfg.solver.blowup_slope_cap == pytest.approx(1e4 / 5e-3)


def test_print_defaults_parses():
    doc = json.loads(print_defaults())
    assert "solver" in doc and "sweep" in doc
    rebuilt = ExperimentConfig.from_dict(doc)
    assert rebuilt.solver.gamma == 3.0


def test_run_experiment_artifacts(tmp_path):
    cfg = small_config(tmp_path)
    rec = run_experiment(cfg)
    assert rec.status == "blew_up"
    names = sorted(os.listdir(tmp_path))
    for required in ("run.jsonl", "summary.json", "meta.json",
                     "final_fields.csv", "snapshots.npz"):
        assert required in names
    summary = json.load(open(tmp_path / "summary.json"))
    assert summary["status"] == "blew_up"
    assert "T_star" in summary
    snaps = load_snapshots(tmp_path)
    assert len(snaps) >= 2
    assert {"s", "y", "W", "Z", "g_w"} <= set(snaps[0])


def test_run_experiment_deterministic(tmp_path):
    # identical config + seed (including out_dir) => byte-identical outputs
    cfg = small_config(tmp_path / "a")
    run_experiment(cfg, str(tmp_path / "a"))
    jl1 = open(tmp_path / "a" / "run.jsonl", "rb").read()
    s1 = open(tmp_path / "a" / "summary.json", "rb").read()
    run_experiment(small_config(tmp_path / "a"), str(tmp_path / "a"))
    assert open(tmp_path / "a" / "run.jsonl", "rb").read() == jl1
    assert open(tmp_path / "a" / "summary.json", "rb").read() == s1


def test_empty_sweep_is_single_run(tmp_path):
    cfg = small_config(tmp_path)
    rows = sweep(cfg, str(tmp_path), max_workers=1)
    assert len(rows) == 1
    assert rows[0]["status"] == "blew_up"
    assert os.path.exists(tmp_path / "sweep.csv")


def test_sweep_cross_product_and_isolation(tmp_path):
    cfg = small_config(tmp_path)
    cfg.sweep.tau0 = [1e-2, -1.0]  # second run is invalid -> error row
    rows = sweep(cfg, str(tmp_path), max_workers=1)
    assert len(rows) == 2
    statuses = sorted(r["status"] for r in rows)
    assert statuses == ["blew_up", "error"]
    hashes = [r["config_hash"] for r in rows]
    assert hashes == sorted(hashes)
    with open(tmp_path / "sweep.csv") as f:
        rows_csv = list(csv.DictReader(f))
    assert len(rows_csv) == 2


def test_cli_simulate_and_diagnose(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    json.dump({"solver": {"n_cells": 1024, "tau0": 1e-2, "record_every": 4,
                          "blowup_slope_cap": 1100.0},
               "out_dir": str(tmp_path / "run")}, open(cfg_path, "w"))
    rc = cli.main(["simulate", "--config", str(cfg_path)])
    assert rc == 0
    rc = cli.main(["diagnose", str(tmp_path / "run" / "run.jsonl"),
                   "--holder-cap", "2.5"])
    assert rc in (0, 1)  # verdict exit code, not a crash


def test_cli_profile_table(tmp_path, capsys):
    rc = cli.main(["profile", "table", "--y1min", "-1", "--y1max", "1",
                   "--y2min", "0", "--y2max", "0", "--n", "3"])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "y1,y2,W,dW1,dW2,residual"
    assert len(out) == 10


def test_cli_check_geometry(capsys):
    rc = cli.main(["check-geometry", "--psi", "1.0", "--q12", "0.2",
                   "--q13", "-0.1", "--q23", "0.3", "--r0", "1.5"])
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_print_defaults(capsys):
    rc = cli.main(["simulate", "--print-defaults"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["solver"]["gamma"] == 3.0
