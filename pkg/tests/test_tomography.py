"""Stimulated-emission reconstruction of the joint spectrum."""

import math

import numpy as np
import pytest

from microspdc import (
    CrystalConfig,
    PumpConfig,
    compare_jsi,
    compute_jsi,
    omega_from_wavelength_nm,
    pump_sigma_for_conditional_width,
    simulate_set,
    stimulated_spectra,
)
from microspdc.jsi import JointSpectralGrid
from microspdc.tomography import SetScanConfig

TWO_PI = 2 * math.pi


@pytest.fixture
def telecom_setup(ln):
    pump = PumpConfig(center_wavelength_nm=532.0, waist_m=100e-6,
                      spectral_width=pump_sigma_for_conditional_width(0.6e12))
    crystal = CrystalConfig(thickness_m=1e-6, material=ln)
    w_s0 = omega_from_wavelength_nm(532.0) - omega_from_wavelength_nm(1560.0)
    omega_s = np.linspace(w_s0 - TWO_PI * 5e12, w_s0 + TWO_PI * 5e12, 160)
    return pump, crystal, omega_s


def scan(step_nm=2.0, resolution_nm=1.0, shg=False):
    return SetScanConfig(seed_start_nm=1500.0, seed_stop_nm=1620.0,
                         seed_step_nm=step_nm,
                         spectrometer_resolution_nm=resolution_nm,
                         include_seed_shg=shg,
                         shg_relative_intensity=0.02)


def test_scan_config_validation():
    with pytest.raises(ValueError):
        SetScanConfig(seed_start_nm=1600.0, seed_stop_nm=1500.0)
    with pytest.raises(ValueError):
        SetScanConfig(seed_step_nm=0.0)
    with pytest.raises(ValueError):
        SetScanConfig(spectrometer_resolution_nm=0.0)


def test_seed_wavelengths_cover_scan():
    wls = scan(step_nm=1.0).seed_wavelengths_nm()
    assert wls[0] == 1500.0
    assert wls[-1] == 1620.0
    assert np.allclose(np.diff(wls), 1.0)


def test_rows_are_seed_frequencies(telecom_setup):
    pump, crystal, omega_s = telecom_setup
    cfg = scan(step_nm=4.0)
    recon = simulate_set(cfg, pump, crystal, omega_s)
    seeds = np.sort(omega_from_wavelength_nm(cfg.seed_wavelengths_nm()))
    np.testing.assert_allclose(recon.omega_i, seeds, rtol=1e-15)
    assert np.all(recon.intensity >= 0)


def test_fine_scan_matches_direct_jsi(telecom_setup):
    pump, crystal, omega_s = telecom_setup
    cfg = scan(step_nm=1.0, resolution_nm=0.1)
    recon = simulate_set(cfg, pump, crystal, omega_s)
    direct = compute_jsi(pump, crystal, omega_s, recon.omega_i)
    result = compare_jsi(direct, recon)
    assert result.rms < 0.02


def test_identical_grids_compare_to_zero(telecom_setup):
    pump, crystal, omega_s = telecom_setup
    omega_i = np.sort(omega_from_wavelength_nm(np.linspace(1500, 1620, 61)))
    grid = compute_jsi(pump, crystal, omega_s, omega_i)
    result = compare_jsi(grid, grid)
    assert result.rms == pytest.approx(0.0, abs=1e-12)


def test_reconstruction_error_grows_with_resolution(telecom_setup):
    pump, crystal, omega_s = telecom_setup
    errors = []
    for res in (0.5, 1.0, 2.0, 4.0):
        recon = simulate_set(scan(step_nm=2.0, resolution_nm=res),
                             pump, crystal, omega_s)
        direct = compute_jsi(pump, crystal, omega_s, recon.omega_i)
        errors.append(compare_jsi(direct, recon).rms)
    assert all(a < b for a, b in zip(errors, errors[1:]))


def test_stimulated_spectra_linearity(telecom_setup):
    """Without the seed artifact the map from JSI rows to stimulated
    spectra is linear: scaling and additivity hold exactly."""
    pump, crystal, omega_s = telecom_setup
    omega_i = np.sort(omega_from_wavelength_nm(np.linspace(1520, 1600, 9)))
    grid = compute_jsi(pump, crystal, omega_s, omega_i)
    out1 = stimulated_spectra(grid, resolution_nm=1.0)
    doubled = JointSpectralGrid(omega_s=grid.omega_s, omega_i=grid.omega_i,
                                intensity=2.0 * grid.intensity)
    out2 = stimulated_spectra(doubled, resolution_nm=1.0)
    np.testing.assert_allclose(out2.intensity, 2.0 * out1.intensity,
                               rtol=1e-12)
    top = JointSpectralGrid(
        omega_s=grid.omega_s, omega_i=grid.omega_i,
        intensity=np.where(np.arange(omega_i.size)[:, None] < 5,
                           grid.intensity, 0.0))
    bottom = JointSpectralGrid(
        omega_s=grid.omega_s, omega_i=grid.omega_i,
        intensity=np.where(np.arange(omega_i.size)[:, None] >= 5,
                           grid.intensity, 0.0))
    out_sum = stimulated_spectra(top, 1.0).intensity \
        + stimulated_spectra(bottom, 1.0).intensity
    np.testing.assert_allclose(out_sum, out1.intensity, rtol=1e-9, atol=1e-30)


def test_convolution_conserves_row_mass(telecom_setup):
    # rows whose stripe sits far from the window edges keep their mass;
    # truncation at the boundary is the only loss mechanism
    pump, crystal, omega_s = telecom_setup
    omega_i = np.sort(omega_from_wavelength_nm(np.linspace(1545, 1575, 7)))
    grid = compute_jsi(pump, crystal, omega_s, omega_i)
    blurred = stimulated_spectra(grid, resolution_nm=1.0)
    for r in range(omega_i.size):
        assert blurred.intensity[r].sum() == pytest.approx(
            grid.intensity[r].sum(), rel=1e-6)


def test_artifact_line_tracks_second_harmonic(telecom_setup):
    pump, crystal, omega_s = telecom_setup
    cfg_art = scan(step_nm=2.0, shg=True)
    cfg_clean = scan(step_nm=2.0, shg=False)
    art = simulate_set(cfg_art, pump, crystal, omega_s)
    clean = simulate_set(cfg_clean, pump, crystal, omega_s)
    extra = art.intensity - clean.intensity
    assert np.all(extra >= -1e-12)
    # the artifact's signal frequency is twice the seed frequency, so it
    # moves with slope +2 while the pair stripe moves with slope -1
    rows = []
    for r in range(art.omega_i.size):
        if extra[r].max() > 0.25 * extra.max():
            j = int(np.argmax(extra[r]))
            if 0 < j < omega_s.size - 1:
                rows.append((art.omega_i[r], art.omega_s[j]))
    rows = np.array(rows)
    assert rows.shape[0] >= 5
    slope = np.polyfit(rows[:, 0], rows[:, 1], 1)[0]
    assert slope == pytest.approx(2.0, rel=0.05)
    stripe_rows = []
    for r in range(clean.omega_i.size):
        j = int(np.argmax(clean.intensity[r]))
        if 0 < j < omega_s.size - 1:
            stripe_rows.append((clean.omega_i[r], clean.omega_s[j]))
    stripe_rows = np.array(stripe_rows)
    stripe_slope = np.polyfit(stripe_rows[:, 0], stripe_rows[:, 1], 1)[0]
    assert stripe_slope == pytest.approx(-1.0, rel=0.05)


def test_compare_rejects_disjoint_grids():
    x = np.linspace(1.0, 2.0, 8)
    a = JointSpectralGrid(omega_s=x, omega_i=x, intensity=np.ones((8, 8)))
    y = x + 10.0
    b = JointSpectralGrid(omega_s=y, omega_i=y, intensity=np.ones((8, 8)))
    with pytest.raises(ValueError):
        compare_jsi(a, b)
