import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("PINCH_CLI", "pinch")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd, timeout=600)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_unknown_key_is_a_config_error(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"system": {"userz": 3}})
    r = run("sweep", "--config", cfg, "--out", tmp_path)
    assert r.returncode == 1
    assert "system.userz" in r.stderr


def test_bad_value_names_the_key(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"placement": {"alpha": 2.0}})
    r = run("placement", "--config", cfg, "--out", tmp_path)
    assert r.returncode == 1
    assert "placement.alpha" in r.stderr


def test_empty_scheme_list_is_rejected(tmp_path):
    cfg = write_json(tmp_path / "c.json", {"experiment": {"schemes": []}})
    r = run("sweep", "--config", cfg, "--out", tmp_path)
    assert r.returncode == 1
    assert "experiment.schemes" in r.stderr


def test_unknown_flag_is_a_usage_error(tmp_path):
    assert run("sweep", "--nonsense").returncode == 1


def test_zero_gain_is_infeasible(tmp_path):
    gains = tmp_path / "g.csv"
    gains.write_text("re_g,im_g\n0,0\n1e-6,0\n")
    r = run("power", "--gains", gains, "--out", tmp_path)
    assert r.returncode == 2


def test_single_user_gets_the_whole_budget(tmp_path):
    gains = tmp_path / "g.csv"
    gains.write_text("re_g,im_g\n1e-5,-2e-5\n")
    r = run("power", "--gains", gains, "--power-w", "0.01", "--noise-w", "1e-12", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "allocation.json").read_text())
    assert doc["q_w"] == [0.01]


def test_single_user_single_antenna_sits_above_the_user(tmp_path):
    layout = tmp_path / "u.csv"
    layout.write_text("x_m,y_m\n1.25,-3\n")
    cfg = write_json(tmp_path / "c.json", {"system": {"users": 1, "antennas": 1}})
    r = run("placement", "--config", cfg, "--layout", layout, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "placement.json").read_text())
    assert doc["antenna_x_m"][0] == pytest.approx(1.25, abs=1e-6)
    assert doc["sr_final_bpshz"] >= doc["sr_init_bpshz"]


def test_corrupt_model_is_rejected(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {
            "system": {"users": 2, "antennas": 2},
            "dataset": {"n_train": 50, "n_test": 10},
            "train": {"epochs": 2, "batch": 10},
        },
    )
    assert run("dataset", "--config", cfg, "--out", tmp_path).returncode == 0
    assert run("train", "--config", cfg, "--out", tmp_path).returncode == 0
    model = tmp_path / "model.pcnn"
    data = bytearray(model.read_bytes())
    data[len(data) // 2] ^= 0x40
    bad = tmp_path / "bad.pcnn"
    bad.write_bytes(bytes(data))
    r = run("infer", "--config", cfg, "--model", bad, "--out", tmp_path)
    assert r.returncode == 3
    assert run("infer", "--config", cfg, "--model", model, "--out", tmp_path).returncode == 0


def test_training_smoke(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {
            "system": {"users": 3, "antennas": 3, "snr_db": 10},
            "dataset": {"n_train": 50, "n_test": 10},
            "train": {"epochs": 3, "batch": 10},
        },
    )
    assert run("dataset", "--config", cfg, "--out", tmp_path).returncode == 0
    r = run("train", "--config", cfg, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    summary = json.loads((tmp_path / "train_summary.json").read_text())
    assert summary["samples"] == 50
    assert len(summary["folds"]) == 5
    curves = (tmp_path / "curves.csv").read_text().splitlines()
    assert curves[0] == "fold,epoch,train_mae,val_mae"
    assert run("infer", "--config", cfg, "--model", tmp_path / "model.pcnn", "--out", tmp_path).returncode == 0
    infer = json.loads((tmp_path / "infer_summary.json").read_text())
    assert infer["feasible_fraction"] == 1.0


def test_seed_makes_runs_repeatable(tmp_path):
    cfg = write_json(
        tmp_path / "c.json",
        {
            "system": {"users": 3, "antennas": 3},
            "experiment": {"schemes": ["C-NOMA", "FPA-NOMA", "PA-OMA"], "sweep_values": [10, 20], "trials": 4},
        },
    )
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run("sweep", "--config", cfg, "--seed", 7, "--out", out).returncode == 0
        outs.append((out / "results.csv").read_bytes() + (out / "summary.json").read_bytes())
    assert outs[0] == outs[1]
    other = tmp_path / "c"
    assert run("sweep", "--config", cfg, "--seed", 8, "--out", other).returncode == 0
    assert (other / "results.csv").read_bytes() != (tmp_path / "a" / "results.csv").read_bytes()


def test_perturbed_gradient_fails_validation(tmp_path):
    r = run("validate", "--perturb-gradient", "0.01", "--out", tmp_path)
    assert r.returncode == 4
    assert "FAIL gradient-check" in r.stdout
