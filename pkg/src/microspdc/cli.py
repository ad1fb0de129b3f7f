"""Command-line front end: wires config files to the library modules.

Every run resolves its configuration (preset, then config file, then
flags), validates it against a strict schema (unknown keys are
rejected), computes, writes plot-ready CSV/JSON data files, and records
a JSON sidecar with the fully resolved config, library versions, and
the seed, so reruns are reproducible byte for byte (modulo the sidecar
timestamp). On any error the partial outputs are removed and a
structured message goes to stderr.
"""

from __future__ import annotations

import argparse
import copy
import datetime
import json
import math
import os
import sys
from importlib import resources

import numpy as np
import scipy
import yaml

from . import __version__
from .dispersion import (
    ENV_MATERIAL_DIR,
    group_delay,
    load_material,
    omega_from_wavelength_nm,
    refractive_index,
)
from .kinematics import (
    CrystalConfig,
    PhotonMode,
    PumpConfig,
    coherence_length,
    pair_probability,
    phase_matching_function,
    pump_function,
)
from .spectra import (
    collinear_mismatch,
    critical_angle,
    frequency_angular_map,
    polarization_response,
    thickness_scan,
    write_spectrum_csv,
)
from . import jsi as jsi_mod
from . import counting as counting_mod
from . import sps as sps_mod
from . import tomography as tomo_mod


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration schema: section -> key -> type spec

_NUMBER = (int, float)

_SCHEMA = {
    "seed": _NUMBER,
    "pump": {
        "wavelength_nm": _NUMBER,
        "waist_um": _NUMBER,
        "sigma_rad_s": _NUMBER,
        "power": _NUMBER,
        "polarization_deg": _NUMBER,
    },
    "crystal": {
        "material": str,
        "thickness_um": _NUMBER,
        "d_eff_pm_per_v": _NUMBER,
        "pump_axis": str,
        "signal_axis": str,
        "idler_axis": str,
        "cut_angle_deg": (int, float, type(None)),
    },
    "map": {
        "wavelength_min_nm": _NUMBER,
        "wavelength_max_nm": _NUMBER,
        "wavelength_points": _NUMBER,
        "angle_min_deg": _NUMBER,
        "angle_max_deg": _NUMBER,
        "angle_points": _NUMBER,
        "mode": str,
        "quadrature_nodes": _NUMBER,
    },
    "thickness": {
        "min_um": _NUMBER,
        "max_um": _NUMBER,
        "points": _NUMBER,
        "signal_wavelength_nm": _NUMBER,
    },
    "jsi": {
        "signal_min_nm": _NUMBER,
        "signal_max_nm": _NUMBER,
        "signal_points": _NUMBER,
        "idler_min_nm": _NUMBER,
        "idler_max_nm": _NUMBER,
        "idler_points": _NUMBER,
        "conditional_width_thz": _NUMBER,
    },
    "counting": {
        "pair_rate_hz": _NUMBER,
        "background1_hz": _NUMBER,
        "background2_hz": _NUMBER,
        "efficiency1": _NUMBER,
        "efficiency2": _NUMBER,
        "jitter_ps": _NUMBER,
        "window_ps": _NUMBER,
        "duration_s": _NUMBER,
        "bin_ps": _NUMBER,
        "max_lag_ps": _NUMBER,
        "timetag_format": str,
    },
    "power": {
        "powers": list,
    },
    "polarization": {
        "angle_min_deg": _NUMBER,
        "angle_max_deg": _NUMBER,
        "angle_points": _NUMBER,
    },
    "sps": {
        "fiber_length_m": _NUMBER,
        "jitter_ps": _NUMBER,
        "n_pairs": _NUMBER,
        "bin_ps": _NUMBER,
        "spectrum_min_nm": _NUMBER,
        "spectrum_max_nm": _NUMBER,
        "spectrum_points": _NUMBER,
        "window_center_nm": _NUMBER,
        "window_fwhm_nm": _NUMBER,
        "calibration_filters_nm": list,
    },
    "set": {
        "seed_start_nm": _NUMBER,
        "seed_stop_nm": _NUMBER,
        "seed_step_nm": _NUMBER,
        "resolution_nm": _NUMBER,
        "include_seed_shg": bool,
        "shg_relative_intensity": _NUMBER,
        "signal_min_nm": _NUMBER,
        "signal_max_nm": _NUMBER,
        "signal_points": _NUMBER,
    },
}

_DEFAULTS = {
    "seed": 12345,
    "pump": {
        "wavelength_nm": 405.0,
        "waist_um": 100.0,
        "sigma_rad_s": 0.0,
        "power": 1.0,
        "polarization_deg": 90.0,
    },
    "crystal": {
        "material": "lithium_niobate_mgo",
        "thickness_um": 1.3754,
        "d_eff_pm_per_v": 40.0,
        "pump_axis": "e",
        "signal_axis": "e",
        "idler_axis": "e",
        "cut_angle_deg": None,
    },
    "map": {
        "wavelength_min_nm": 460.0,
        "wavelength_max_nm": 2200.0,
        "wavelength_points": 512,
        "angle_min_deg": -15.0,
        "angle_max_deg": 15.0,
        "angle_points": 512,
        "mode": "quadrature",
        "quadrature_nodes": 512,
    },
    "thickness": {
        "min_um": 0.05,
        "max_um": 9.7,
        "points": 800,
        "signal_wavelength_nm": 810.0,
    },
    # degenerate window: the blue-blue corner's sum frequency must stay
    # inside the material validity range, which caps it at 810 +/- 10 nm
    "jsi": {
        "signal_min_nm": 801.0,
        "signal_max_nm": 821.0,
        "signal_points": 512,
        "idler_min_nm": 801.0,
        "idler_max_nm": 821.0,
        "idler_points": 512,
        "conditional_width_thz": 0.6,
    },
    "counting": {
        "pair_rate_hz": 357142.857142857,
        "background1_hz": 0.0,
        "background2_hz": 0.0,
        "efficiency1": 1.0,
        "efficiency2": 1.0,
        "jitter_ps": 50.0,
        "window_ps": 1000.0,
        "duration_s": 10.0,
        "bin_ps": 100.0,
        "max_lag_ps": 10000.0,
        "timetag_format": "none",
    },
    "power": {
        "powers": [0.25, 0.5, 1.0, 2.0, 4.0],
    },
    "polarization": {
        "angle_min_deg": 0.0,
        "angle_max_deg": 90.0,
        "angle_points": 10,
    },
    "sps": {
        "fiber_length_m": 160.0,
        "jitter_ps": 50.0,
        "n_pairs": 200000,
        "bin_ps": 10.0,
        "spectrum_min_nm": 600.0,
        "spectrum_max_nm": 1100.0,
        "spectrum_points": 1001,
        "window_center_nm": 810.0,
        "window_fwhm_nm": 200.0,
        "calibration_filters_nm": [660.0, 720.0, 780.0, 840.0, 900.0, 950.0],
    },
    # seeds near 3 * pump wavelength keep the stimulated signal and the
    # seed second harmonic in one window, and all sum frequencies inside
    # the default material's validity range
    "set": {
        "seed_start_nm": 1210.0,
        "seed_stop_nm": 1220.0,
        "seed_step_nm": 0.5,
        "resolution_nm": 0.5,
        "include_seed_shg": False,
        "shg_relative_intensity": 0.02,
        "signal_min_nm": 604.0,
        "signal_max_nm": 611.0,
        "signal_points": 300,
    },
}


def _validate(node, schema, path=""):
    if not isinstance(node, dict):
        raise ConfigError(f"config section {path or '<root>'} must be a mapping")
    for key, value in node.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key: {where}")
        spec = schema[key]
        if isinstance(spec, dict):
            _validate(value, spec, where)
        elif spec is list:
            if not isinstance(value, list) or not all(
                    isinstance(v, _NUMBER) for v in value):
                raise ConfigError(f"{where} must be a list of numbers")
        elif spec is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"{where} must be a boolean")
        else:
            if isinstance(value, bool) and spec is not bool:
                raise ConfigError(f"{where} must not be a boolean")
            if not isinstance(value, spec):
                raise ConfigError(f"{where} has the wrong type")


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _load_yaml(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config document must be a mapping")
    return doc


def _preset_path(name: str):
    p = resources.files(__package__).joinpath("presets", f"{name}.yaml")
    if not p.is_file():
        names = sorted(e.name[:-5]
                       for e in resources.files(__package__).joinpath("presets").iterdir()
                       if e.name.endswith(".yaml"))
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(names)}")
    return p


def resolve_config(config_path=None, preset=None, seed=None) -> dict:
    """Defaults <- preset <- config file <- seed flag, validated."""
    cfg = copy.deepcopy(_DEFAULTS)
    if preset is not None:
        doc = yaml.safe_load(_preset_path(preset).read_text(encoding="utf-8")) or {}
        _validate(doc, _SCHEMA)
        cfg = _merge(cfg, doc)
    if config_path is not None:
        doc = _load_yaml(config_path)
        _validate(doc, _SCHEMA)
        cfg = _merge(cfg, doc)
    if seed is not None:
        cfg["seed"] = int(seed)
    return cfg


# ---------------------------------------------------------------------------
# object construction from config

def _pump_from(cfg, sigma_override=None) -> PumpConfig:
    p = cfg["pump"]
    sigma = p["sigma_rad_s"] if sigma_override is None else sigma_override
    return PumpConfig(center_wavelength_nm=float(p["wavelength_nm"]),
                      waist_m=float(p["waist_um"]) * 1e-6,
                      spectral_width=float(sigma),
                      power=float(p["power"]),
                      polarization_angle_deg=float(p["polarization_deg"]))


def _crystal_from(cfg) -> CrystalConfig:
    c = cfg["crystal"]
    material = load_material(c["material"])
    cut = c["cut_angle_deg"]
    return CrystalConfig(thickness_m=float(c["thickness_um"]) * 1e-6,
                         material=material,
                         d_eff_pm_per_v=float(c["d_eff_pm_per_v"]),
                         pump_axis=c["pump_axis"],
                         signal_axis=c["signal_axis"],
                         idler_axis=c["idler_axis"],
                         cut_angle_deg=None if cut is None else float(cut))


def _jsi_sigma(cfg) -> float:
    width_thz = float(cfg["jsi"]["conditional_width_thz"])
    if width_thz > 0:
        return jsi_mod.pump_sigma_for_conditional_width(width_thz * 1e12)
    sigma = float(cfg["pump"]["sigma_rad_s"])
    if sigma <= 0:
        raise ConfigError("set jsi.conditional_width_thz or pump.sigma_rad_s")
    return sigma


def _jsi_axes(cfg):
    j = cfg["jsi"]
    omega_s = np.sort(omega_from_wavelength_nm(
        np.linspace(float(j["signal_min_nm"]), float(j["signal_max_nm"]),
                    int(j["signal_points"]))))
    omega_i = np.sort(omega_from_wavelength_nm(
        np.linspace(float(j["idler_min_nm"]), float(j["idler_max_nm"]),
                    int(j["idler_points"]))))
    return omega_s, omega_i


# ---------------------------------------------------------------------------
# output helpers

class _Run:
    """Tracks written files so a failed run leaves nothing behind."""

    def __init__(self, out_dir, command, config):
        self.out_dir = out_dir
        self.command = command
        self.config = config
        self.outputs = []

    def path(self, name):
        os.makedirs(self.out_dir, exist_ok=True)
        p = os.path.join(self.out_dir, name)
        self.outputs.append(p)
        return p

    def cleanup(self):
        for p in self.outputs:
            try:
                os.unlink(p)
            except OSError:
                pass

    def write_sidecar(self, extra=None):
        sidecar = {
            "command": self.command,
            "config": self.config,
            "package_version": __version__,
            "numpy_version": np.__version__,
            "scipy_version": scipy.__version__,
            "seed": self.config.get("seed"),
            "material_dir_env": os.environ.get(ENV_MATERIAL_DIR),
            "outputs": [os.path.basename(p) for p in self.outputs],
            "created_utc": datetime.datetime.now(datetime.timezone.utc)
                                            .isoformat(),
        }
        if extra:
            sidecar.update(extra)
        path = self.path(f"{self.command.replace('-', '_')}_run.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.10g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_spectrum(run: _Run):
    cfg = run.config
    m = cfg["map"]
    pump = _pump_from(cfg)
    crystal = _crystal_from(cfg)
    wl = np.linspace(float(m["wavelength_min_nm"]), float(m["wavelength_max_nm"]),
                     int(m["wavelength_points"]))
    ang = np.linspace(float(m["angle_min_deg"]), float(m["angle_max_deg"]),
                      int(m["angle_points"]))
    grid = frequency_angular_map(pump, crystal, wl, ang, mode=m["mode"],
                                 n_nodes=int(m["quadrature_nodes"]))
    write_spectrum_csv(grid, run.path("spectrum.csv"))
    run.write_sidecar()


def _cmd_thickness(run: _Run):
    cfg = run.config
    t = cfg["thickness"]
    pump = _pump_from(cfg)
    crystal = _crystal_from(cfg)
    mm = collinear_mismatch(pump, crystal, float(t["signal_wavelength_nm"]))
    thicknesses = np.linspace(float(t["min_um"]), float(t["max_um"]),
                              int(t["points"])) * 1e-6
    omega_s = omega_from_wavelength_nm(float(t["signal_wavelength_nm"]))
    signal = PhotonMode(omega_s, 0.0, crystal.signal_axis)
    idler = PhotonMode(pump.omega0 - omega_s, 0.0, crystal.idler_axis)
    rates = thickness_scan(pump, crystal, thicknesses, signal, idler)
    _write_csv(run.path("thickness.csv"), "thickness_um,relative_rate",
               zip((thicknesses * 1e6).tolist(), rates.tolist()))
    lc = coherence_length(mm.longitudinal)
    run.write_sidecar({"coherence_length_um":
                       None if math.isinf(lc) else lc * 1e6})


def _cmd_jsi(run: _Run, measures_only=False):
    cfg = run.config
    pump = _pump_from(cfg, sigma_override=_jsi_sigma(cfg))
    crystal = _crystal_from(cfg)
    omega_s, omega_i = _jsi_axes(cfg)
    grid = jsi_mod.compute_jsi(pump, crystal, omega_s, omega_i)
    report = jsi_mod.entanglement_report(grid)
    payload = {
        "unconditional_width_thz": report.unconditional_width_hz / 1e12,
        "conditional_width_thz": report.conditional_width_hz / 1e12,
        "unconditional_range_limited": report.unconditional_range_limited,
        "conditional_range_limited": report.conditional_range_limited,
        "fedorov_ratio": report.fedorov_ratio,
        "schmidt_number": report.schmidt_number,
    }
    if measures_only:
        _write_json(run.path("entanglement.json"), payload)
    else:
        jsi_mod.export_jsi(grid, run.path("jsi.csv"), run.path("jsi_metrics.json"),
                           pump, crystal)
    run.write_sidecar(payload)


def _cmd_g2(run: _Run):
    cfg = run.config
    c = cfg["counting"]
    stream = counting_mod.synthesize_stream(
        float(c["pair_rate_hz"]),
        (float(c["background1_hz"]), float(c["background2_hz"])),
        (float(c["efficiency1"]), float(c["efficiency2"])),
        float(c["jitter_ps"]), float(c["duration_s"]), int(cfg["seed"]))
    summary = counting_mod.measure(stream, float(c["window_ps"]))
    curve = counting_mod.coincidence_histogram(stream, float(c["bin_ps"]),
                                               float(c["max_lag_ps"]))
    _write_csv(run.path("g2_histogram.csv"), "lag_ps,g2,counts",
               zip(curve.lag_ps.tolist(), curve.g2.tolist(),
                   curve.counts.tolist()))
    _write_json(run.path("g2_summary.json"), {
        "n1_hz": summary.n1, "n2_hz": summary.n2, "nc_hz": summary.nc,
        "window_s": summary.t_c_s, "accidental_hz": summary.n_a,
        "real_hz": summary.n_r, "g2_zero": summary.g2_zero,
        "car": summary.car,
    })
    fmt = c["timetag_format"]
    if fmt == "csv":
        counting_mod.write_timetags_csv(stream, run.path("timetags.csv"))
    elif fmt == "binary":
        counting_mod.write_timetags_binary(stream, run.path("timetags.bin"))
    elif fmt != "none":
        raise ConfigError("counting.timetag_format must be none, csv, or binary")
    run.write_sidecar()


def _cmd_power_sweep(run: _Run):
    cfg = run.config
    c = cfg["counting"]
    base = counting_mod.HbtConfig(
        pair_rate=float(c["pair_rate_hz"]),
        background_rates=(float(c["background1_hz"]), float(c["background2_hz"])),
        efficiencies=(float(c["efficiency1"]), float(c["efficiency2"])),
        jitter_sigma_ps=float(c["jitter_ps"]),
        window_ps=float(c["window_ps"]),
        duration_s=float(c["duration_s"]))
    points = counting_mod.power_sweep(base, cfg["power"]["powers"],
                                      int(cfg["seed"]))
    rows = [(p.power, p.summary.n1, p.summary.n2, p.summary.nc,
             p.summary.n_a, p.summary.n_r, p.summary.g2_zero, p.summary.car)
            for p in points]
    _write_csv(run.path("power_sweep.csv"),
               "power,n1_hz,n2_hz,nc_hz,accidental_hz,real_hz,g2_zero,car",
               rows)
    run.write_sidecar()


def _cmd_polarization(run: _Run):
    cfg = run.config
    p = cfg["polarization"]
    angles = np.linspace(float(p["angle_min_deg"]), float(p["angle_max_deg"]),
                         int(p["angle_points"]))
    z = polarization_response(angles, "z")
    y = polarization_response(angles, "y")
    _write_csv(run.path("polarization.csv"),
               "pump_angle_deg,z_analyzed,y_analyzed",
               zip(angles.tolist(), z.tolist(), y.tolist()))
    run.write_sidecar()


def _cmd_sps(run: _Run):
    cfg = run.config
    s = cfg["sps"]
    pump = _pump_from(cfg)
    crystal = _crystal_from(cfg)
    wl = np.linspace(float(s["spectrum_min_nm"]), float(s["spectrum_max_nm"]),
                     int(s["spectrum_points"]))
    phase = np.array([collinear_mismatch(pump, crystal, float(l)).longitudinal
                      for l in wl])
    density = phase_matching_function(phase, crystal.thickness_m)
    spectrum = sps_mod.Spectrum1D(wavelength_nm=wl, density=density,
                                  pump_wavelength_nm=pump.center_wavelength_nm)
    window = sps_mod.gaussian_window(float(s["window_center_nm"]),
                                     float(s["window_fwhm_nm"]), wl)
    hist = sps_mod.simulate_sps(spectrum, float(s["fiber_length_m"]), window,
                                float(s["jitter_ps"]), int(s["n_pairs"]),
                                int(cfg["seed"]), float(s["bin_ps"]))
    filters = [float(f) for f in s["calibration_filters_nm"]]
    points = [(f, float(sps_mod.delay_difference_ps(
        f, pump.center_wavelength_nm, float(s["fiber_length_m"]))))
        for f in filters]
    cal = sps_mod.calibrate(points)
    rec = sps_mod.reconstruct_spectrum(hist, cal)
    _write_csv(run.path("sps_histogram.csv"), "dt_ps,counts",
               zip(hist.centers_ps.tolist(), hist.counts.tolist()))
    _write_csv(run.path("sps_spectrum.csv"), "wavelength_nm,density_per_nm",
               zip(rec.wavelength_nm.tolist(), rec.density_per_nm.tolist()))
    width, limited = rec.fwhm_nm()
    _write_json(run.path("sps_calibration.json"), {
        "coefficients_high_to_low": cal.coefficients.tolist(),
        "residual_rms_nm": cal.residual_rms_nm,
        "monotonic": cal.monotonic,
        "points": [{"wavelength_nm": w, "dt_ps": t} for w, t in cal.points],
    })
    run.write_sidecar({"reconstructed_fwhm_nm": width,
                       "fwhm_range_limited": limited,
                       "excluded_bins": rec.n_excluded_bins})


def _cmd_set(run: _Run):
    cfg = run.config
    s = cfg["set"]
    pump = _pump_from(cfg, sigma_override=_jsi_sigma(cfg))
    crystal = _crystal_from(cfg)
    scan = tomo_mod.SetScanConfig(
        seed_start_nm=float(s["seed_start_nm"]),
        seed_stop_nm=float(s["seed_stop_nm"]),
        seed_step_nm=float(s["seed_step_nm"]),
        spectrometer_resolution_nm=float(s["resolution_nm"]),
        include_seed_shg=bool(s["include_seed_shg"]),
        shg_relative_intensity=float(s["shg_relative_intensity"]))
    omega_s = np.sort(omega_from_wavelength_nm(
        np.linspace(float(s["signal_min_nm"]), float(s["signal_max_nm"]),
                    int(s["signal_points"]))))
    recon = tomo_mod.simulate_set(scan, pump, crystal, omega_s)
    direct = jsi_mod.compute_jsi(pump, crystal, omega_s, recon.omega_i)
    result = tomo_mod.compare_jsi(direct, recon)
    jsi_mod.export_jsi(recon, run.path("set_grid.csv"),
                       run.path("set_metrics.json"), pump, crystal)
    _write_json(run.path("set_compare.json"), {
        "normalized_rms": result.rms,
        "omega_s_bounds_rad_s": list(result.omega_s_bounds),
        "omega_i_bounds_rad_s": list(result.omega_i_bounds),
    })
    run.write_sidecar()


def _cmd_validate(run: _Run):
    checks = run_validation_checks()
    for name, ok, detail in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
    payload = {"checks": [{"name": n, "ok": ok, "detail": d}
                          for n, ok, d in checks],
               "all_passed": all(ok for _, ok, _ in checks)}
    _write_json(run.path("validate_results.json"), payload)
    run.write_sidecar()
    # results are the product here, so a failure keeps them and only
    # flips the exit code
    return 0 if payload["all_passed"] else 2


def run_validation_checks():
    """Fast self-checks of the analytic identities and fixture values."""
    checks = []

    def check(name, ok, detail):
        checks.append((name, bool(ok), detail))

    vac = load_material("vacuum")
    n_vac = refractive_index(vac, "e", 810.0)
    check("vacuum identity", n_vac == 1.0, f"n = {n_vac}")

    ln = load_material("lithium_niobate_mgo")
    n_ln = refractive_index(ln, "e", 810.0)
    check("LN e-index fixture", abs(n_ln - 2.165671437) < 1e-3,
          f"n_e(810 nm) = {n_ln:.6f}")
    n_blue, n_red = refractive_index(ln, "e", 500.0), refractive_index(ln, "e", 1500.0)
    check("normal dispersion", n_blue > n_red,
          f"n(500) = {n_blue:.4f} > n(1500) = {n_red:.4f}")

    pump = PumpConfig(405.0, 100e-6)
    crystal = CrystalConfig(1e-6, ln)
    mm = collinear_mismatch(pump, crystal, 810.0)
    lc_um = coherence_length(mm.longitudinal) * 1e6
    check("coherence length", abs(lc_um - 1.37) / 1.37 < 0.10,
          f"L_c = {lc_um:.4f} um vs 1.37 um (10% tolerance)")

    check("phase matching at zero", phase_matching_function(0.0, 1e-6) == 1.0,
          "sinc^2(0) = 1")
    x_half = phase_matching_function(math.pi / 1e-6, 2e-6)
    check("phase matching null", x_half < 1e-12, f"sinc^2(pi) = {x_half:.2e}")
    val = phase_matching_function(math.pi / 2 / 1e-6, 2e-6)
    check("phase matching quarter", abs(val - (2 / math.pi) ** 2) < 1e-12,
          f"sinc^2(pi/2) = {val:.6f}")
    pf = pump_function(1.0 / 100e-6, 100e-6)
    check("pump function 1/e", abs(pf - math.exp(-1)) < 1e-12, f"F_p = {pf:.6f}")

    lc_m = lc_um * 1e-6
    dk = mm.longitudinal
    zeros = pair_probability(40.0, np.array([2 * lc_m, 4 * lc_m]), dk, 0.0, 100e-6)
    peaks = pair_probability(40.0, np.array([lc_m, 3 * lc_m, 5 * lc_m]), dk, 0.0,
                             100e-6)
    check("thickness zeros", np.all(zeros < 1e-6 * peaks.max()),
          f"P(2Lc)/peak = {zeros.max() / peaks.max():.2e}")
    spread = float(np.ptp(peaks)) / peaks.max()
    check("equal odd peaks", spread < 1e-9, f"spread = {spread:.2e}")

    check("critical angle n=2", abs(critical_angle(2.0) - 30.0) < 1e-12,
          f"{critical_angle(2.0):.4f} deg")
    ca = critical_angle(n_ln)
    check("LN critical angle", abs(ca - 27.50) < 0.1, f"{ca:.3f} deg")

    x = np.linspace(-8.0, 8.0, 256)
    X, Y = np.meshgrid(x, x, indexing="xy")
    amp = np.exp(-0.25 * ((X + Y) ** 2 / 4.0 + (X - Y) ** 2))
    g = jsi_mod.JointSpectralGrid(x, x, amp * amp)
    k_num = jsi_mod.schmidt_number(g)
    check("double-Gaussian Schmidt", abs(k_num - 1.25) / 1.25 < 0.02,
          f"K = {k_num:.4f} vs 1.25")

    summ = counting_mod.summarize(1e5, 1e5, 20.0, 1e-9)
    check("count summary arithmetic",
          abs(summ.g2_zero - 2.0) < 1e-12 and abs(summ.car - 1.0) < 1e-12,
          f"g2 = {summ.g2_zero}, CAR = {summ.car}")

    silica = load_material("fused_silica")
    dtau = (group_delay(silica, "iso", 700.0, 160.0)
            - group_delay(silica, "iso", 900.0, 160.0))
    check("fiber delay dispersion", abs(dtau * 1e12 - 3542.3) < 35.0,
          f"tau(700) - tau(900) = {dtau * 1e12:.1f} ps over 160 m")

    tau_c = sps_mod.correlation_time(sps_mod.bandwidth_hz(200.0, 810.0))
    check("correlation time 200 nm", 10e-15 / 1.5 < tau_c < 10e-15 * 1.5,
          f"tau_c = {tau_c * 1e15:.2f} fs")

    angles = np.arange(0.0, 91.0, 10.0)
    z = polarization_response(angles, "z")
    model = np.sin(np.deg2rad(angles)) ** 2
    ss_res = float(np.sum((z - model) ** 2))
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    y = polarization_response(angles, "y")
    check("polarization law", r2 > 0.999 and np.all(y == 0),
          f"R^2 = {r2:.6f}, y-analyzed max = {y.max()}")

    return checks


# ---------------------------------------------------------------------------

_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "thickness": _cmd_thickness,
    "jsi": _cmd_jsi,
    "entanglement": lambda run: _cmd_jsi(run, measures_only=True),
    "g2": _cmd_g2,
    "power-sweep": _cmd_power_sweep,
    "polarization": _cmd_polarization,
    "sps": _cmd_sps,
    "set": _cmd_set,
    "validate": _cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microspdc",
        description="Photon-pair generation simulations: spectra, "
                    "entanglement measures, counting statistics, and "
                    "virtual measurements.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--preset", help="name of a shipped preset")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, help="override the RNG seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.preset, args.seed)
        run = _Run(args.out, args.command, cfg)
        try:
            code = _COMMANDS[args.command](run)
        except BaseException:
            run.cleanup()
            raise
    except Exception as exc:  # structured error for scripting
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}),
              file=sys.stderr)
        return 1
    return 0 if code is None else int(code)


if __name__ == "__main__":
    sys.exit(main())
