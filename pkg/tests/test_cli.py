"""Command-line interface: config handling, outputs, reproducibility."""

import json

import pytest
import yaml

from microspdc.cli import ConfigError, main, resolve_config

FAST_CONFIG = {
    "map": {"wavelength_points": 48, "angle_points": 17,
            "quadrature_nodes": 48},
    "thickness": {"points": 64},
    "jsi": {"signal_points": 48, "idler_points": 48},
    "counting": {"duration_s": 0.2, "max_lag_ps": 5000.0},
    "power": {"powers": [0.5, 1.0]},
    "sps": {"n_pairs": 4000, "spectrum_points": 301},
    "set": {"seed_step_nm": 8.0, "signal_points": 64},
}


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "fast.yaml"
    path.write_text(yaml.safe_dump(FAST_CONFIG))
    return str(path)


def run(args):
    return main(args)


EXPECTED_FILES = {
    "spectrum": ["spectrum.csv", "spectrum_run.json"],
    "thickness": ["thickness.csv", "thickness_run.json"],
    "jsi": ["jsi.csv", "jsi_metrics.json", "jsi_run.json"],
    "entanglement": ["entanglement.json", "entanglement_run.json"],
    "g2": ["g2_histogram.csv", "g2_summary.json", "g2_run.json"],
    "power-sweep": ["power_sweep.csv", "power_sweep_run.json"],
    "polarization": ["polarization.csv", "polarization_run.json"],
    "sps": ["sps_histogram.csv", "sps_spectrum.csv", "sps_calibration.json",
            "sps_run.json"],
    "set": ["set_grid.csv", "set_metrics.json", "set_compare.json",
            "set_run.json"],
}


@pytest.mark.parametrize("command", sorted(EXPECTED_FILES))
def test_each_command_writes_outputs(command, fast_config, tmp_path):
    out = tmp_path / command
    rc = run([command, "--config", fast_config, "--out", str(out),
              "--seed", "5"])
    assert rc == 0
    for name in EXPECTED_FILES[command]:
        assert (out / name).is_file(), name
    sidecar = json.loads(
        (out / f"{command.replace('-', '_')}_run.json").read_text())
    assert sidecar["command"] == command
    assert sidecar["seed"] == 5
    assert sidecar["config"]["seed"] == 5
    assert "package_version" in sidecar and "numpy_version" in sidecar


def test_validate_passes(tmp_path, capsys):
    rc = run(["validate", "--out", str(tmp_path / "v")])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "FAIL" not in printed
    results = json.loads((tmp_path / "v" / "validate_results.json")
                         .read_text())
    assert results["all_passed"] is True
    assert len(results["checks"]) >= 10


def test_reruns_are_byte_identical(fast_config, tmp_path):
    for d in ("a", "b"):
        rc = run(["g2", "--config", fast_config, "--out",
                  str(tmp_path / d), "--seed", "3"])
        assert rc == 0
    for name in ("g2_histogram.csv", "g2_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()
    a = json.loads((tmp_path / "a" / "g2_run.json").read_text())
    b = json.loads((tmp_path / "b" / "g2_run.json").read_text())
    a.pop("created_utc"), b.pop("created_utc")
    assert a == b


def test_seed_flag_overrides_config(fast_config, tmp_path):
    run(["g2", "--config", fast_config, "--out", str(tmp_path / "s1"),
         "--seed", "1"])
    run(["g2", "--config", fast_config, "--out", str(tmp_path / "s2"),
         "--seed", "2"])
    h1 = (tmp_path / "s1" / "g2_histogram.csv").read_bytes()
    h2 = (tmp_path / "s2" / "g2_histogram.csv").read_bytes()
    assert h1 != h2


def test_unknown_key_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("pump:\n  wavelenght_nm: 405.0\n")
    rc = run(["spectrum", "--config", str(bad), "--out",
              str(tmp_path / "o")])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "ConfigError"
    assert "pump.wavelenght_nm" in err["error"]["message"]
    assert not (tmp_path / "o").exists()


def test_failed_run_leaves_no_partial_outputs(tmp_path, capsys):
    cfg = tmp_path / "crash.yaml"
    # wavelengths below the pump are rejected after the run starts
    cfg.write_text(yaml.safe_dump({
        "map": {"wavelength_min_nm": 300.0, "wavelength_points": 16,
                "angle_points": 5, "quadrature_nodes": 16}}))
    out = tmp_path / "o"
    rc = run(["spectrum", "--config", str(cfg), "--out", str(out)])
    assert rc == 1
    json.loads(capsys.readouterr().err)  # structured error on stderr
    assert not list(out.glob("*")) if out.exists() else True


def test_preset_loads_and_config_overrides(tmp_path):
    over = tmp_path / "over.yaml"
    over.write_text(yaml.safe_dump({
        "counting": {"duration_s": 0.5, "pair_rate_hz": 100000.0}}))
    out = tmp_path / "o"
    rc = run(["g2", "--preset", "hbt_counting", "--config", str(over),
              "--out", str(out)])
    assert rc == 0
    sidecar = json.loads((out / "g2_run.json").read_text())
    # preset seed survives, config overrides the counting section
    assert sidecar["config"]["seed"] == 42
    assert sidecar["config"]["counting"]["duration_s"] == 0.5
    assert sidecar["config"]["counting"]["pair_rate_hz"] == 100000.0
    assert sidecar["config"]["counting"]["window_ps"] == 1000.0


def test_unknown_preset_lists_available(capsys, tmp_path):
    rc = run(["g2", "--preset", "nope", "--out", str(tmp_path / "o")])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert "hbt_counting" in err["error"]["message"]


def test_timetag_export_formats(fast_config, tmp_path):
    over = tmp_path / "fmt.yaml"
    base = dict(FAST_CONFIG)
    base["counting"] = dict(FAST_CONFIG["counting"],
                            timetag_format="binary")
    over.write_text(yaml.safe_dump(base))
    out = tmp_path / "o"
    rc = run(["g2", "--config", str(over), "--out", str(out)])
    assert rc == 0
    assert (out / "timetags.bin").stat().st_size % 9 == 0


def test_resolve_config_defaults_complete():
    cfg = resolve_config()
    for section in ("pump", "crystal", "map", "thickness", "jsi",
                    "counting", "power", "polarization", "sps", "set"):
        assert section in cfg
    assert cfg["seed"] == 12345


def test_resolve_config_rejects_non_mapping(tmp_path):
    p = tmp_path / "list.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        resolve_config(config_path=str(p))


def test_material_dir_env_used_by_cli(tmp_path, monkeypatch, capsys):
    # a material resolvable only through the environment variable
    mats = tmp_path / "mats"
    mats.mkdir()
    (mats / "unit_glass.txt").write_text(
        "name: unit_glass\naxis: iso\nform: constant\n"
        "range_nm: 100 10000\nterm: 1.5\n")
    monkeypatch.setenv("MICROSPDC_MATERIALS", str(mats))
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(yaml.safe_dump({
        "crystal": {"material": "unit_glass", "thickness_um": 1.0},
        "thickness": {"points": 16}}))
    out = tmp_path / "o"
    rc = run(["thickness", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    sidecar = json.loads((out / "thickness_run.json").read_text())
    assert sidecar["material_dir_env"] == str(mats)
