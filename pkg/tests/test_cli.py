import json

import numpy as np
import pytest

from cfregret.cli import main
from cfregret.bounds import user_upper


def write_cfg(tmp_path, **over):
    d = {
        "model": {"n_users": 20, "n_user_types": 5, "n_item_types": 30},
        "algorithm": "Random",
        "horizon": 30,
        "trials": 5,
        "base_seed": 3,
        "coldstart_gammas": [0.4],
        "emit_bounds": ["UserUpper"],
    }
    d.update(over)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(d))
    return p


def test_simulate_writes_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "run.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "t,regret_mean,regret_se,slope_mean,bound_UserUpper"
    assert len(lines) == 31
    captured = capsys.readouterr()
    assert "coldstart(0.4) = never" in captured.out


def test_simulate_overrides_change_output(tmp_path):
    cfg = write_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", str(cfg), "--out", str(a)])
    main(["simulate", "--config", str(cfg), "--out", str(b), "--seed", "99"])
    assert a.read_bytes() != b.read_bytes()
    c = tmp_path / "c.csv"
    main(["simulate", "--config", str(cfg), "--out", str(c), "--trials", "2"])
    assert c.read_bytes() != a.read_bytes()


def test_simulate_repeat_run_identical(tmp_path):
    cfg = write_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", str(cfg), "--out", str(a)])
    main(["simulate", "--config", str(cfg), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"model": {"n_users": 5}, "algorithm": "Nope", "horizon": 3}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "x.csv")]) == 2
    notjson = tmp_path / "nj.json"
    notjson.write_text("{broken")
    assert main(["simulate", "--config", str(notjson), "--out", str(tmp_path / "x.csv")]) == 2


def test_bounds_subcommand(tmp_path):
    out = tmp_path / "b.csv"
    rc = main(["bounds", "--kind", "UserUpper", "--N", "400", "--qU", "80",
               "--T", "100", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "t,bound_UserUpper"
    vals = np.array([float(x.split(",")[1]) for x in lines[1:]])
    expect = user_upper(100, n_users=400, n_user_types=80).values
    assert np.allclose(vals, [float("%.6g" % v) for v in expect])
    assert vals[-1] == 64.0


def test_bounds_missing_param_exit_2(tmp_path):
    rc = main(["bounds", "--kind", "UserUpper", "--N", "400", "--T", "10",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    rc = main(["bounds", "--kind", "ItemLower", "--N", "64", "--T", "10",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_coldstart_subcommand(tmp_path, capsys):
    cfg = write_cfg(tmp_path, algorithm="Omniscient", coldstart_gammas=[], emit_bounds=[])
    assert main(["coldstart", "--config", str(cfg), "--gamma", "0.3"]) == 0
    assert "coldstart(0.3) = 1" in capsys.readouterr().out
    assert main(["coldstart", "--config", str(cfg), "--gamma", "1.3"]) == 2


def test_verify_ballsbins(capsys):
    assert main(["verify", "--suite", "ballsbins"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2
    assert "FAIL" not in out
