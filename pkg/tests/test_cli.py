from __future__ import annotations

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from g2coclosed.cli import COLUMNS, RunConfig, ConfigError, main, read_table


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def _cone_cfg(tmp_path, **grid):
    return _write(tmp_path / "cone.json", {
        "profile": {"kind": "cone"}, "b0": 1.0,
        "grid": {"t_max": 2.0, "points": 101, **grid},
        "outputs": {"dir": "out", "stem": "cone"},
    })


def test_solve_cone_last_row(tmp_path):
    assert main(["solve", "--config", _cone_cfg(tmp_path)]) == 0
    meta, table, _ = read_table(tmp_path / "out" / "cone.csv")
    assert table.shape == (11, 101)
    assert np.all(np.abs(table[7:10, -1] - 2.0) <= 1e-8)
    assert len(meta["config_sha256"]) == 64
    side = json.loads((tmp_path / "out" / "cone.json").read_text())
    assert side["schema_version"] == 1
    assert side["bootstrap"]["d4_exact"] == ["1/16"] * 3
    assert side["bootstrap"]["b2"] == [0.125] * 3


def test_csv_header_and_format(tmp_path):
    main(["solve", "--config", _cone_cfg(tmp_path)])
    lines = (tmp_path / "out" / "cone.csv").read_text().splitlines()
    assert lines[0].startswith("# g2coclosed ")
    assert tuple(lines[1].split(",")) == COLUMNS
    first = lines[2].split(",")
    assert first[0] == "0.0" and first[-1] == "nan"
    # shortest round-trip floats
    for tok in lines[50].split(","):
        assert repr(float(tok)) == tok


def test_solve_bryant_salamon_ratio(tmp_path):
    assert main(["solve", "--profile", "bryant_salamon", "--t-max", "200", "--out", str(tmp_path)]) == 0
    _, table, _ = read_table(tmp_path / "run.csv")
    ratio = table[4, -1] / table[1, -1]
    assert ratio == pytest.approx(math.sqrt(3), rel=1e-2)
    assert abs(ratio - math.sqrt(3)) < abs(table[4, 20] / table[1, 20] - math.sqrt(3))


def test_b0_zero_rejected(tmp_path, capsys):
    assert main(["solve", "--profile", "cone", "--b0", "0", "--out", str(tmp_path)]) == 2
    assert "b0 must be nonzero" in capsys.readouterr().err
    assert not list(tmp_path.iterdir())


def test_config_validation_messages():
    with pytest.raises(ConfigError, match="leading coefficient 1/2"):
        RunConfig.from_dict({"profile": {"kind": "odd_poly", "coeffs": [[0.5], [1.0], [0.5]]}})
    with pytest.raises(ConfigError, match="t_max > t_switch"):
        RunConfig.from_dict({"grid": {"t_max": 0.001}})
    with pytest.raises(ConfigError, match="profile.kind"):
        RunConfig.from_dict({"profile": "torus"})
    with pytest.raises(ConfigError, match="b0 must be a number"):
        RunConfig.from_dict({"b0": "one"})


def test_config_hash_ignores_paths():
    a = RunConfig.from_dict({"outputs": {"dir": "x"}})
    b = RunConfig.from_dict({"outputs": {"dir": "y", "stem": "z"}})
    c = RunConfig.from_dict({"b0": 2.0})
    assert a.digest() == b.digest() != c.digest()


def test_deterministic_bytes(tmp_path):
    cfg = _cone_cfg(tmp_path)
    main(["solve", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["solve", "--config", cfg, "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "cone.csv").read_bytes() == (tmp_path / "b" / "cone.csv").read_bytes()
    assert (tmp_path / "a" / "cone.json").read_bytes() == (tmp_path / "b" / "cone.json").read_bytes()


def test_round_trip_verify(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {
        "profile": {"kind": "odd_poly", "coeffs": [[0.5, 0.05], [0.5, -0.01], [0.5]]},
        "b0": -0.7, "grid": {"t_max": 2.0, "points": 101}, "outputs": {"stem": "gen"},
    })
    assert main(["solve", "--config", cfg]) == 0
    capsys.readouterr()
    assert main(["verify", "--table", str(tmp_path / "gen.csv")]) == 0
    out = capsys.readouterr().out
    assert "PASS replay_res_dpsi" in out and "PASS replay_table" in out and "FAIL" not in out
    rep = json.loads((tmp_path / "gen.verify.json").read_text())
    assert rep["schema_version"] == 1
    names = [c["name"] for c in rep["checks"]]
    assert names[:5] == ["config_hash", "table_ascending", "table_consistency", "table_coclosed", "replay_res_dpsi"]


def test_corrupted_table_fails(tmp_path, capsys):
    main(["solve", "--config", _cone_cfg(tmp_path)])
    path = tmp_path / "out" / "cone.csv"
    lines = path.read_text().splitlines()
    out = lines[:2]
    for ln in lines[2:]:
        cols = ln.split(",")
        cols[4] = repr(float(cols[4]) * 1.1)
        out.append(",".join(cols))
    path.write_text("\n".join(out) + "\n")
    capsys.readouterr()
    assert main(["verify", "--table", str(path)]) == 1
    text = capsys.readouterr().out
    assert "FAIL table_coclosed" in text
    assert "FAIL table_consistency" in text


def test_verify_missing_file(tmp_path, capsys):
    assert main(["verify", "--table", str(tmp_path / "nope.csv")]) == 2
    assert main(["solve", "--config", str(tmp_path / "nope.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_verify_config_runs(tmp_path):
    assert main(["verify", "--profile", "cone", "--t-max", "1.5", "--out", str(tmp_path)]) == 0
    assert main(["verify", "--profile", "bryant_salamon", "--t-max", "5", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "run.verify.json").read_text())
    closed = [c for c in rep["checks"] if c["name"] == "closed"][0]
    assert closed["status"] == "pass" and closed["residual"] <= 1e-6


def test_sweep_summary(tmp_path):
    cfg = _cone_cfg(tmp_path)
    assert main(["sweep", "--config", cfg, "--param", "b0", "--values", "0.5,1,2"]) == 0
    lines = (tmp_path / "out" / "cone_summary.csv").read_text().splitlines()
    assert lines[1] == "index,param,value,status,passed,max_res_dpsi,sumD_tmax"
    rows = [ln.split(",") for ln in lines[2:]]
    assert [r[2] for r in rows] == ["0.5", "1.0", "2.0"]
    for r in rows:
        b0 = float(r[2])
        assert float(r[6]) == pytest.approx(3 * (b0**2 * 4 / 4 + 16 / 16), rel=1e-8)
    first = (tmp_path / "out" / "cone_summary.csv").read_bytes()
    main(["sweep", "--config", cfg, "--param", "b0", "--values", "0.5,1,2"])
    assert (tmp_path / "out" / "cone_summary.csv").read_bytes() == first


def test_sweep_records_partial_failure(tmp_path):
    cfg = _cone_cfg(tmp_path)
    assert main(["sweep", "--config", cfg, "--values", "1,0"]) == 1
    rows = (tmp_path / "out" / "cone_summary.csv").read_text().splitlines()[2:]
    assert rows[0].split(",")[3] == "ok"
    assert "b0 must be nonzero" in rows[1]


def test_sweep_empty_range(tmp_path):
    assert main(["sweep", "--config", _cone_cfg(tmp_path), "--values", ""]) == 2
    assert main(["sweep", "--config", _cone_cfg(tmp_path), "--values", " , "]) == 2


def test_compact_demo(tmp_path, capsys):
    assert main(["compact-demo", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("no compact extension")
    rep = json.loads((tmp_path / "compact_demo.json").read_text())
    assert min(rep["growth_per_decade"]) >= 10
    assert rep["sumD_end"] > rep["sumD_half"] > 0


def test_compact_demo_rejects_bad_extension(tmp_path, capsys):
    cfg = _write(tmp_path / "bad.json", {"profile": {"kind": "odd_poly", "coeffs": [[1.0], [0.5], [0.5]], "L": 1.0}})
    assert main(["compact-demo", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_special_families(tmp_path):
    for name in ("cone", "symmetric", "bryant_salamon"):
        assert main(["special", "--profile", name, "--out", str(tmp_path)]) == 0
        _, table, _ = read_table(tmp_path / f"{name}.csv")
        assert np.nanmax(table[10]) < 1e-6
    assert main(["special", "--profile", "torus", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "g2coclosed", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().startswith("g2c ")
    assert main(["frobnicate"]) == 2
