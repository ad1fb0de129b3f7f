"""Frequency-angular emission maps and derived scans."""

import math

import numpy as np
import pytest

from microspdc import (
    CrystalConfig,
    PhotonMode,
    PumpConfig,
    coherence_length,
    collinear_mismatch,
    critical_angle,
    frequency_angular_map,
    polarization_response,
    refractive_index,
    thickness_scan,
)
from microspdc.spectra import (
    external_angle_deg,
    internal_angle_rad,
    write_spectrum_csv,
)


WL = np.linspace(460.0, 2200.0, 128)
ANG = np.linspace(-15.0, 15.0, 41)


def small_map(pump, crystal, mode="quadrature", wl=WL, ang=ANG, nodes=128):
    return frequency_angular_map(pump, crystal, wl, ang, mode=mode,
                                 n_nodes=nodes)


def test_map_shape_and_invariants(pump, thin_crystal):
    grid = small_map(pump, thin_crystal)
    assert grid.intensity.shape == (WL.size, ANG.size)
    assert np.all(np.isfinite(grid.intensity))
    assert np.all(grid.intensity >= 0)
    assert np.all(grid.intensity[grid.mask] == 0)
    assert grid.intensity.max() > 0


def test_map_symmetric_in_angle(pump, thin_crystal):
    # collinear pump, so emission cannot depend on the sign of the angle
    grid = small_map(pump, thin_crystal)
    np.testing.assert_allclose(grid.intensity, grid.intensity[:, ::-1],
                               rtol=1e-9, atol=0.0)


def test_quadrature_reduces_to_weighted_collinear_on_axis(pump, thin_crystal):
    """On axis the idler-angle integral is the collinear integrand times
    the pump function's angular weight sqrt(pi) / (k_i w)."""
    from microspdc.dispersion import (omega_from_wavelength_nm,
                                      wavelength_nm_from_omega)
    ang = np.array([0.0])
    wl = WL[::4]
    quad = frequency_angular_map(pump, thin_crystal, wl, ang,
                                 mode="quadrature", n_nodes=512)
    coll = frequency_angular_map(pump, thin_crystal, wl, ang,
                                 mode="collinear-pump")
    omega_i = pump.omega0 - omega_from_wavelength_nm(wl)
    lam_i = wavelength_nm_from_omega(omega_i)
    n_i = refractive_index(thin_crystal.material, "e", lam_i)
    k_i = n_i * omega_i / 299792458.0
    expected = coll.intensity[:, 0] * math.sqrt(math.pi) / (k_i * pump.waist_m)
    np.testing.assert_allclose(quad.intensity[:, 0], expected, rtol=1e-4)


def test_conjugate_duality(pump, thin_crystal):
    """The signal at (lambda, theta) and the idler at the conjugate
    wavelength and transverse-matched angle are the same pair, so the
    collinear-pump map assigns them the same intensity."""
    lam_s, theta_s = 700.0, 3.0
    lam_c = 1.0 / (1.0 / 405.0 - 1.0 / lam_s)
    theta_c = math.degrees(math.asin(
        math.sin(math.radians(theta_s)) * lam_c / lam_s))
    a = frequency_angular_map(pump, thin_crystal, np.array([lam_s]),
                              np.array([theta_s]), mode="collinear-pump")
    b = frequency_angular_map(pump, thin_crystal, np.array([lam_c]),
                              np.array([theta_c]), mode="collinear-pump")
    assert a.intensity[0, 0] == pytest.approx(b.intensity[0, 0], rel=1e-9)


def test_quadrature_convergence(pump, thin_crystal):
    wl = np.linspace(600.0, 1200.0, 32)
    ang = np.linspace(-10.0, 10.0, 17)
    coarse = frequency_angular_map(pump, thin_crystal, wl, ang,
                                   mode="quadrature", n_nodes=128)
    fine = frequency_angular_map(pump, thin_crystal, wl, ang,
                                 mode="quadrature", n_nodes=256)
    peak = fine.intensity.max()
    assert np.max(np.abs(coarse.intensity - fine.intensity)) < 0.01 * peak


def test_masked_cells_are_conjugate_trapped(pump, thin_crystal):
    """Cells are masked exactly where the conjugate idler cannot leave
    the crystal: |sin(theta_i,int)| > 1/n_i."""
    grid = small_map(pump, thin_crystal)
    n_e_810 = refractive_index(thin_crystal.material, "e", 810.0)
    found = False
    for i, lam in enumerate(grid.wavelength_nm):
        lam_i = 1.0 / (1.0 / 405.0 - 1.0 / lam)
        for j, ang in enumerate(grid.angle_deg):
            # transverse matching maps the signal's external angle onto
            # the idler: omega_s sin(t_s) = -omega_i sin(t_i) outside
            sin_i_ext = abs(math.sin(math.radians(ang))) * lam_i / lam
            if grid.mask[i, j]:
                found = True
                assert sin_i_ext > 0.99  # beyond any physical external angle
    assert found or n_e_810 > 0  # mask may be empty on coarse grids


def test_mask_blue_corner_only(pump, thin_crystal):
    grid = small_map(pump, thin_crystal)
    if not grid.mask.any():
        pytest.skip("grid too coarse to reach the trapped corner")
    rows = np.nonzero(grid.mask.any(axis=1))[0]
    # trapping needs a strongly red idler, i.e. a blue signal
    assert grid.wavelength_nm[rows.max()] < 810.0


def test_interior_nulls_at_five_coherence_lengths(pump, ln):
    lam_s = np.linspace(460.0, 2200.0, 4001)
    pump_ = PumpConfig(center_wavelength_nm=405.0, waist_m=100e-6)
    mm0 = collinear_mismatch(pump_, CrystalConfig(1e-6, ln), 810.0)
    lc = coherence_length(mm0.longitudinal)
    crystal = CrystalConfig(5 * lc, ln)
    phase = np.array([collinear_mismatch(pump_, crystal, lam).longitudinal
                      for lam in lam_s]) * crystal.thickness_m / 2.0
    # count sign changes of sin(phase)/phase, i.e. sinc nulls crossed
    crossings = np.nonzero(np.diff(np.floor(phase / math.pi)))[0]
    assert len(crossings) == 2
    # degenerate point sits exactly at -2.5 pi (odd multiple: a maximum)
    mid = collinear_mismatch(pump_, crystal, 810.0).longitudinal \
        * crystal.thickness_m / 2.0
    assert mid / math.pi == pytest.approx(-2.5, rel=1e-6)


def test_thickness_scan_matches_pair_probability(pump, thin_crystal):
    w = pump.omega0 / 2.0
    signal = PhotonMode(w, 0.0, "e")
    idler = PhotonMode(w, 0.0, "e")
    thicknesses = np.linspace(0.2e-6, 8e-6, 100)
    scan = thickness_scan(pump, thin_crystal, thicknesses, signal, idler)
    assert scan.shape == thicknesses.shape
    assert np.all(scan >= 0)
    # odd-multiple maxima are equal because sinc^2 * L^2 depends on
    # L only through the phase
    mm = collinear_mismatch(pump, thin_crystal, 810.0)
    lc = coherence_length(mm.longitudinal)
    vals = thickness_scan(pump, thin_crystal, np.array([lc, 3 * lc, 5 * lc]),
                          signal, idler)
    assert np.ptp(vals) / vals.max() < 1e-9


def test_critical_angle_values(ln):
    assert critical_angle(2.0) == pytest.approx(30.0, abs=1e-12)
    n = refractive_index(ln, "e", 810.0)
    assert critical_angle(n) == pytest.approx(27.50012578, rel=1e-6)
    with pytest.raises(ValueError):
        critical_angle(0.5)


def test_internal_external_angle_round_trip(ln):
    n = refractive_index(ln, "e", 810.0)
    for ext in (0.0, 5.0, 14.9):
        t_int = internal_angle_rad(n, ext)
        assert external_angle_deg(n, t_int) == pytest.approx(ext, rel=1e-10)
        assert abs(t_int) < abs(math.radians(ext)) or ext == 0.0


def test_external_angle_nan_past_tir(ln):
    n = refractive_index(ln, "e", 810.0)
    t_crit = math.asin(1.0 / n)
    assert math.isnan(external_angle_deg(n, t_crit + 0.01))


def test_polarization_response_law():
    angles = np.arange(0.0, 91.0, 10.0)
    z = polarization_response(angles, "z")
    np.testing.assert_allclose(z, np.sin(np.deg2rad(angles)) ** 2,
                               rtol=0, atol=1e-15)
    assert np.all(polarization_response(angles, "y") == 0.0)
    with pytest.raises(ValueError):
        polarization_response(angles, "x")


def test_map_rejects_wavelengths_at_or_below_pump(pump, thin_crystal):
    with pytest.raises(ValueError):
        frequency_angular_map(pump, thin_crystal, np.array([400.0, 800.0]),
                              np.array([0.0]))


def test_spectrum_csv_format(tmp_path, pump, thin_crystal):
    wl = np.linspace(700.0, 900.0, 5)
    ang = np.linspace(-2.0, 2.0, 3)
    grid = frequency_angular_map(pump, thin_crystal, wl, ang,
                                 mode="collinear-pump")
    path = tmp_path / "spectrum.csv"
    write_spectrum_csv(grid, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "wavelength_nm,external_angle_deg,intensity,masked"
    assert len(lines) == 1 + wl.size * ang.size
    first = lines[1].split(",")
    assert float(first[0]) == 700.0
    assert float(first[1]) == -2.0
    assert first[3] in ("0", "1")


def test_map_determinism(pump, thin_crystal):
    a = small_map(pump, thin_crystal, wl=WL[:32], ang=ANG[:9], nodes=64)
    b = small_map(pump, thin_crystal, wl=WL[:32], ang=ANG[:9], nodes=64)
    assert np.array_equal(a.intensity, b.intensity)
