"""Config validation, file outputs, determinism and exit codes."""

import json
from pathlib import Path

import pytest

from entemp.cli import main, resolve_config, table1_config
from entemp.errors import ConfigError


def minimal_config(**over):
    raw = {"metric_kind": "flat", "lattice_sites": 24,
           "partition_list": [8, 12], "eps_count": 5, "eps_max": 0.04,
           "l_max": 20}
    raw.update(over)
    return raw


def write_config(tmp_path, **over):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(minimal_config(**over)))
    return str(p)


def test_resolve_minimal_defaults():
    cfg = resolve_config({"metric_kind": "schwarzschild",
                          "lattice_sites": 48})
    assert cfg.partition_list == [8, 12, 16, 24, 32, 40]
    assert len(cfg.eps_values) == 11
    assert cfg.eps_values[0] == 0.0
    assert cfg.energy_mode == "horizon"
    assert cfg.tol == 1e-8


def test_resolve_aggregates_all_violations():
    with pytest.raises(ConfigError) as err:
        resolve_config({
            "metric_kind": "reissner_nordstrom",
            "metric_q": 1.2,
            "lattice_sites": 2,
            "eps_count": 1,
            "bogus_key": 5,
        })
    text = "; ".join(err.value.violations)
    assert "metric_q=1.2" in text
    assert "lattice_sites" in text
    assert "eps_count" in text
    assert "bogus_key" in text
    assert len(err.value.violations) >= 4


def test_resolve_rejects_eps_conflicts():
    with pytest.raises(ConfigError):
        resolve_config(minimal_config(eps_values=[0, 0.01, 0.02],
                                      eps_max=0.05))


def test_resolve_rejects_custom_kind():
    with pytest.raises(ConfigError):
        resolve_config(minimal_config(metric_kind="custom"))


def test_invalid_charge_exits_2(tmp_path, capsys):
    path = write_config(tmp_path, metric_kind="reissner_nordstrom",
                        metric_q=1.2)
    code = main(["run", "--config", path, "--out", str(tmp_path / "o")])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "config"
    assert any("metric_q" in v for v in err["error"]["violations"])


def test_missing_config_exits_2(tmp_path):
    code = main(["run", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o")])
    assert code == 2


def test_run_writes_artifacts(tmp_path):
    path = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--config", path, "--out", str(out),
                 "--threads", "2"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema_version"] == 1
    body = report["report"]
    assert body["metric_kind"] == "flat"
    assert not body["has_horizon"]
    assert body["relative_deviation"] is None
    assert {s["n"] for s in body["per_n"]} == {8, 12}
    for n in (8, 12):
        lines = (out / f"sweep_{n}.csv").read_text().splitlines()
        assert lines[0] == "epsilon,energy,entropy"
        assert len(lines) == 6  # header + 5 offsets
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config"]["tol"] == 1e-8  # defaults echoed
    assert meta["config"]["energy_mode"] == "horizon"
    assert "runtime_seconds" in meta


def test_run_is_deterministic(tmp_path):
    path = write_config(tmp_path, metric_kind="schwarzschild")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", path, "--out", str(out1)]) == 0
    assert main(["run", "--config", path, "--out", str(out2)]) == 0
    for name in ["report.json", "sweep_8.csv", "sweep_12.csv"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_emit_matrices(tmp_path):
    path = write_config(tmp_path, emit_matrices=True)
    out = tmp_path / "out"
    assert main(["run", "--config", path, "--out", str(out)]) == 0
    for n in (8, 12):
        for tag in ("K0", "K1", "K2"):
            lines = (out / f"{tag}_n{n}.csv").read_text().splitlines()
            assert lines[0] == "row,col,value"


def test_oracle_check_passes():
    assert main(["oracle-check", "--quiet"]) == 0


def test_area_law_command(tmp_path):
    path = write_config(tmp_path, partition_list=[6, 9, 12, 15],
                        l_max=300, tol=1e-6)
    out = tmp_path / "al"
    assert main(["area-law", "--config", path, "--out", str(out)]) == 0
    fit = json.loads((out / "area_law.json").read_text())["fit"]
    assert 1.5 < fit["exponent"] < 2.3
    lines = (out / "area_law.csv").read_text().splitlines()
    assert lines[0] == "n,entropy"
    assert len(lines) == 5


def test_table1_scales():
    desk = table1_config("desk")
    assert desk["lattice_sites"] == 200
    paper = table1_config("paper")
    assert paper["lattice_sites"] == 600
    assert paper["partition_list"] == [100, 150, 200, 300, 400, 500]
