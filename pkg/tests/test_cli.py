"""CLI subcommands, exercised in-process through main()."""

import json
import shutil
import subprocess

import pytest

from rbmrange.cli import main
from rbmrange.io import load_json

DISK = {"name": "disk", "center": [0.0, 0.0], "radius": 1.0}


def write_config(path, **fields):
    base = dict(domain=DISK, drift={"name": "linear"}, delta=0.01,
                n_steps=500, seed=3, grid_resolution=40,
                out_dir=str(path.parent / "out"))
    base.update(fields)
    path.write_text(json.dumps(base))
    return path


def test_simulate(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert "500 steps" in capsys.readouterr().out
    assert (tmp_path / "out" / "trajectory.csv").is_file()
    assert load_json(tmp_path / "out" / "trajectory.json")["seed"] == 3


def test_simulate_seed_and_out_overrides(tmp_path):
    cfg = write_config(tmp_path / "run.json")
    assert main(["simulate", "--config", str(cfg),
                 "--seed", "9", "--out", str(tmp_path / "other")]) == 0
    man = load_json(tmp_path / "other" / "trajectory.json")
    assert man["seed"] == 9


def test_density_reuses_trajectory(tmp_path):
    cfg = write_config(tmp_path / "run.json", bandwidth=0.15)
    main(["simulate", "--config", str(cfg)])
    out = tmp_path / "out"
    assert main(["density", "--config", str(cfg),
                 "--traj", str(out / "trajectory.csv"),
                 "--traj-manifest", str(out / "trajectory.json")]) == 0
    man = load_json(out / "density.json")
    assert man["h"] == 0.15
    first = (out / "density.csv").read_text().splitlines()[0]
    assert first == "x,y,ghat"


def test_levelset(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", levels=[0.15, 0.3],
                       bandwidth=0.15)
    assert main(["levelset", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "lambda=0.15" in out and "lambda=0.3" in out
    assert (tmp_path / "out" / "region_01.json").is_file()


def test_levelset_requires_levels(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    assert main(["levelset", "--config", str(cfg)]) == 2
    assert "config error" in capsys.readouterr().err


def test_fixed_content(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", tau=0.5, bandwidth=0.15)
    assert main(["fixed-content", "--config", str(cfg), "--region"]) == 0
    out = capsys.readouterr().out
    assert "threshold=" in out
    assert (tmp_path / "out" / "region_tau.json").is_file()


def test_drift(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", drift_h_loc=0.3)
    assert main(["drift", "--config", str(cfg)]) == 0
    assert "valid nodes" in capsys.readouterr().out
    lines = (tmp_path / "out" / "drift.csv").read_text().splitlines()
    assert lines[0] == "x,y,ux,uy,count,valid"


def test_hausdorff(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("x,y\n0.0,0.0\n1.0,0.0\n")
    b.write_text("x,y\n0.0,0.0\n1.0,3.0\n")
    assert main(["hausdorff", str(a), str(b)]) == 0
    assert float(capsys.readouterr().out) == 3.0


def test_hausdorff_bad_file_is_data_error(tmp_path, capsys):
    a = tmp_path / "a.csv"
    a.write_text("nope\n")
    assert main(["hausdorff", str(a), str(a)]) == 3
    assert "data error" in capsys.readouterr().err


def test_oracle_regeneration(tmp_path, capsys):
    assert main(["oracle", "--resolution", "80",
                 "--out", str(tmp_path)]) == 0
    fixture = load_json(tmp_path / "reference_oracle.json")
    assert fixture["c"] == pytest.approx(1.9820944757121293, rel=0.02)
    assert "0.27" in fixture["lambda_contents"]
    assert fixture["generation"]["resolution"] == 80


def test_pipeline_command(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", levels=[0.2], bandwidth=0.15)
    assert main(["pipeline", "--config", str(cfg)]) == 0
    assert "artifacts" in capsys.readouterr().out
    assert (tmp_path / "out" / "bundle.json").is_file()


def test_missing_config_is_exit_2(tmp_path, capsys):
    assert main(["simulate"]) == 2
    assert "needs --config" in capsys.readouterr().err


def test_missing_track_file_is_exit_3(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"track": {"path": str(tmp_path / "no.csv")},
                               "out_dir": str(tmp_path / "out")}))
    assert main(["simulate", "--config", str(cfg)]) == 3


def test_numerical_guard_is_exit_4(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json", levels=[99.0], bandwidth=0.15)
    assert main(["levelset", "--config", str(cfg)]) == 4
    assert "numerical guard" in capsys.readouterr().err


def test_unknown_command_exits_via_argparse(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_console_script_installed():
    exe = shutil.which("rbmrange")
    assert exe, "console script not on PATH"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for name in ("simulate", "density", "levelset", "fixed-content",
                 "drift", "hausdorff", "oracle", "pipeline"):
        assert name in proc.stdout
