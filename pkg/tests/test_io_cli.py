import json

import numpy as np
import pytest

from xxzlaser.cli import main, parse_config
from xxzlaser.errors import ConfigError
from xxzlaser.io import (
    COLUMNS,
    SweepRow,
    SweepTable,
    config_hash,
    read_sweep_table,
    write_sweep_table,
)
from xxzlaser.presets import PRESET_NAMES, build_preset


def _row(**kw):
    base = dict(
        L=2,
        U_over_J=1.0,
        P_over_J=1.0,
        g_over_J=0.1,
        kappa_over_J=0.05,
        n_max=8,
        method="exact",
        observable="photon_number",
        value=1.234567890123,
    )
    base.update(kw)
    return SweepRow(**base)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    table = SweepTable(rows=[_row(), _row(observable="g2_zero", value=None, undefined=True)])
    cfg = {"schema_version": 1, "mode": "ness", "params": {"L": 2}}
    write_sweep_table(str(path), table, cfg)
    meta, rows = read_sweep_table(str(path))
    assert meta["schema_version"] == "1"
    assert meta["config_hash"] == config_hash(cfg)
    assert len(rows) == 2
    assert rows[0]["observable"] == "photon_number"
    assert float(rows[0]["value"]) == pytest.approx(1.234567890123)
    assert rows[1]["value"] == ""
    assert rows[1]["undefined"] == "1"
    header = path.read_text().splitlines()
    assert [line for line in header if line.startswith("#")]
    assert header[-3].lstrip("# ").startswith("units") or any(
        "units" in line for line in header if line.startswith("#")
    )
    assert ",".join(COLUMNS) in path.read_text()


def test_config_hash_is_canonical():
    a = {"mode": "ness", "params": {"L": 2, "U": 1.0}}
    b = {"params": {"U": 1.0, "L": 2}, "mode": "ness"}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "mode": "sweep"})


def test_parse_config_errors():
    with pytest.raises(ConfigError):
        parse_config({"mode": "ness", "params": {"L": 2}})  # missing schema_version
    with pytest.raises(ConfigError):
        parse_config({"schema_version": 1, "mode": "banana", "params": {"L": 2}})
    with pytest.raises(ConfigError):
        parse_config({"schema_version": 1, "mode": "ness", "params": {"L": 0}})
    with pytest.raises(ConfigError):
        parse_config(
            {
                "schema_version": 1,
                "mode": "ness",
                "params": {"L": 2},
                "sweep_axis": {"name": "kappa", "values": [1.0]},
            }
        )
    with pytest.raises(ConfigError):
        parse_config({"schema_version": 1, "mode": "trajectory", "params": {"L": 2}})


def test_presets_all_parse():
    assert len(PRESET_NAMES) >= 7
    for name in PRESET_NAMES:
        for quick in (False, True):
            cfg = build_preset(name, quick=quick)
            parsed = parse_config(cfg)
            assert parsed.mode in ("ness", "sweep", "spectrum", "correlations",
                                   "cooperativity", "trajectory")
    with pytest.raises(ConfigError):
        build_preset("fig99", quick=True)


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 2, "mode": "ness", "params": {"L": 2}}))
    assert main(["--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    notjson = tmp_path / "notjson.json"
    notjson.write_text("{nope")
    assert main(["--config", str(notjson)]) == 2
    assert main(["--list-presets"]) == 0
    assert main([]) == 2


def test_cli_ness_run_deterministic(tmp_path):
    cfg = {
        "schema_version": 1,
        "mode": "ness",
        "params": {"L": 2, "U": 1.0, "n_max": 8},
        "adaptive_cutoff": False,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["--config", str(cfg_path), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    meta, rows = read_sweep_table(str(out1))
    names = {r["observable"] for r in rows}
    assert {"photon_number", "g2_zero", "total_magnetization"} <= names
    sidecar = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert "written_at" in sidecar
    assert sidecar["config"]["mode"] == "ness"


def test_cli_sweep_with_axis(tmp_path):
    cfg = {
        "schema_version": 1,
        "mode": "sweep",
        "params": {"L": 2, "n_max": 8},
        "adaptive_cutoff": False,
        "sweep_axis": {"name": "U", "values": [0.5, 1.0]},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "sweep.csv"
    assert main(["--config", str(cfg_path), "--out", str(out)]) == 0
    _, rows = read_sweep_table(str(out))
    u_vals = sorted({float(r["U_over_J"]) for r in rows})
    assert u_vals == [0.5, 1.0]


def test_cli_trajectory_mode(tmp_path):
    cfg = {
        "schema_version": 1,
        "mode": "trajectory",
        "params": {"L": 2, "n_max": 8},
        "correlations": False,
        "ensemble": {
            "num_trajectories": 3,
            "base_seed": 1,
            "method": "jump",
            "schedule": {"dt": 0.05, "t_burn": 20.0, "t_total": 120.0,
                         "sample_every": 2.0},
        },
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "traj.csv"
    assert main(["--config", str(cfg_path), "--out", str(out)]) == 0
    _, rows = read_sweep_table(str(out))
    assert all(r["method"] == "jump" for r in rows)
    ph = [r for r in rows if r["observable"] == "photon_number"]
    assert ph and float(ph[0]["standard_error"]) >= 0.0
