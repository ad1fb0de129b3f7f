"""Fiber single-photon spectroscopy: delays, calibration, reconstruction."""

import math

import numpy as np
import pytest

from microspdc import bandwidth_hz, correlation_time, simulate_sps
from microspdc.sps import (
    CalibrationCurve,
    Spectrum1D,
    calibrate,
    conjugate_wavelength_nm,
    delay_difference_ps,
    gaussian_window,
    mirrored_window,
    reconstruct_spectrum,
)


def flat_spectrum(lo=600.0, hi=1100.0, n=1001):
    wl = np.linspace(lo, hi, n)
    return Spectrum1D(wavelength_nm=wl, density=np.ones(n),
                      pump_wavelength_nm=405.0)


def cal_points(filters=(660.0, 720.0, 780.0, 840.0, 900.0, 950.0),
               length_m=160.0):
    return [(f, float(delay_difference_ps(f, 405.0, length_m)))
            for f in filters]


def test_conjugate_wavelength():
    lam_c = conjugate_wavelength_nm(700.0, 405.0)
    assert 1.0 / lam_c == pytest.approx(1.0 / 405.0 - 1.0 / 700.0, rel=1e-12)
    # degenerate point maps to itself
    assert conjugate_wavelength_nm(810.0, 405.0) == pytest.approx(810.0,
                                                                  rel=1e-12)
    with pytest.raises(ValueError):
        conjugate_wavelength_nm(405.0, 405.0)


def test_delay_difference_reference_value():
    # 160 m of standard fiber separates 700 and 900 nm photons by 3.54 ns
    d700 = delay_difference_ps(700.0, 405.0, 160.0)
    d900 = delay_difference_ps(900.0, 405.0, 160.0)
    # conjugate pairs mirror: dt(700) = -dt(conj(700)) and the pair
    # (700, 900) is nearly conjugate for a 405 pump
    assert d700 > 0 > d900
    tau_700 = 3542.3220754  # ps, group-delay dispersion over 160 m
    from microspdc import group_delay, load_material
    silica = load_material("fused_silica")
    direct = (group_delay(silica, "iso", 700.0, 160.0)
              - group_delay(silica, "iso", 900.0, 160.0)) * 1e12
    assert direct == pytest.approx(tau_700, rel=1e-6)


def test_delay_antisymmetric_about_degeneracy():
    d = delay_difference_ps(810.0, 405.0, 160.0)
    assert abs(d) < 1e-9
    a = delay_difference_ps(700.0, 405.0, 160.0)
    b = delay_difference_ps(conjugate_wavelength_nm(700.0, 405.0), 405.0,
                            160.0)
    assert a == pytest.approx(-b, rel=1e-10)


def test_two_line_spectrum_gives_two_peaks():
    wl = np.linspace(650.0, 1000.0, 2001)
    density = np.zeros_like(wl)
    density[np.argmin(np.abs(wl - 700.0))] = 1.0
    density[np.argmin(np.abs(wl - 900.0))] = 1.0
    spec = Spectrum1D(wavelength_nm=wl, density=density,
                      pump_wavelength_nm=405.0)
    hist = simulate_sps(spec, fiber_length_m=160.0, efficiency=None,
                        detector_jitter_ps=20.0, n_pairs=20000, seed=0,
                        bin_ps=25.0)
    d700 = float(delay_difference_ps(700.0, 405.0, 160.0))
    d900 = float(delay_difference_ps(900.0, 405.0, 160.0))
    centers = hist.centers_ps
    counts = hist.counts.astype(float)
    for target in (d700, d900):
        sel = np.abs(centers - target) < 200.0
        assert counts[sel].sum() > 0.4 * counts.sum()
    # each line pairs with its own conjugate, giving well-separated
    # features on opposite sides of zero delay
    assert d700 > 1000.0 > -1000.0 > d900


def test_calibration_exact_cubic():
    # points generated by an exact cubic are fit with zero residual
    coeffs = [1e-9, -2e-6, 0.06, 810.0]  # lambda(dt), highest power first
    dts = np.array([-3000.0, -1500.0, 0.0, 1500.0, 3000.0])
    pts = [(float(np.polyval(coeffs, t)), float(t)) for t in dts]
    cal = calibrate(pts)
    assert cal.residual_rms_nm < 1e-9
    np.testing.assert_allclose(cal.coefficients, coeffs, rtol=1e-6)


def test_calibration_permutation_invariant():
    pts = cal_points()
    cal_a = calibrate(pts)
    cal_b = calibrate(list(reversed(pts)))
    np.testing.assert_allclose(cal_a.coefficients, cal_b.coefficients,
                               rtol=1e-12)


def test_calibration_inverts_physical_delays():
    cal = calibrate(cal_points())
    assert cal.monotonic
    # the cubic approximates the group-delay curve to sub-nm over 300 nm
    assert cal.residual_rms_nm < 0.5
    for lam in (700.0, 810.0, 900.0):
        dt = float(delay_difference_ps(lam, 405.0, 160.0))
        assert cal.wavelength_nm(dt) == pytest.approx(lam, abs=2.0)


def test_calibration_needs_four_distinct_points():
    pts = cal_points()[:3]
    with pytest.raises(ValueError):
        calibrate(pts)
    dup = cal_points()[:4]
    dup[3] = dup[2]
    with pytest.raises(ValueError):
        calibrate(dup)


def test_nonmonotonic_calibration_is_flagged():
    # an s-shaped sample set inverts the derivative inside the span
    pts = [(700.0, -3000.0), (800.0, -1000.0), (750.0, 1000.0),
           (900.0, 3000.0), (870.0, 2000.0)]
    cal = calibrate(pts)
    assert not cal.monotonic


def test_reconstruction_conserves_counts():
    spec = flat_spectrum()
    window = gaussian_window(810.0, 200.0, spec.wavelength_nm)
    hist = simulate_sps(spec, 160.0, window, 50.0, 50000, seed=1, bin_ps=10.0)
    cal = calibrate(cal_points())
    rec = reconstruct_spectrum(hist, cal)
    assert np.all(np.diff(rec.wavelength_nm) > 0)
    # Jacobian reconstruction conserves the kept counts exactly
    kept = float(rec.bin_counts.sum())
    total = float(hist.counts.sum())
    assert kept <= total
    assert rec.n_excluded_bins == hist.counts.size - rec.bin_counts.size
    # only the window tails beyond the calibrated span are dropped
    excluded = total - kept
    assert excluded < 0.15 * total


def test_reconstruction_excludes_out_of_span_bins():
    spec = flat_spectrum(600.0, 1100.0)
    hist = simulate_sps(spec, 160.0, None, 10.0, 30000, seed=2, bin_ps=10.0)
    # narrow calibration span: bins mapping outside 700-900 are dropped
    cal = calibrate(cal_points(filters=(700.0, 760.0, 840.0, 900.0)))
    rec = reconstruct_spectrum(hist, cal)
    assert rec.n_excluded_bins > 0
    assert rec.wavelength_nm.min() >= 690.0
    assert rec.wavelength_nm.max() <= 910.0


def test_reconstructed_window_width():
    spec = flat_spectrum()
    window = gaussian_window(810.0, 200.0, spec.wavelength_nm)
    hist = simulate_sps(spec, 160.0, window, 50.0, 200000, seed=3, bin_ps=10.0)
    cal = calibrate(cal_points())
    rec = reconstruct_spectrum(hist, cal)
    width, limited = rec.fwhm_nm()
    assert not limited
    assert width == pytest.approx(200.0, rel=0.05)


def test_mirrored_window_shrinks_effective_band():
    wl = np.linspace(600.0, 1100.0, 1001)
    eta = np.exp(-0.5 * ((wl - 810.0) / 120.0) ** 2)
    pair = mirrored_window(wl, eta, pump_wavelength_nm=405.0)
    vals = pair(wl)
    solo = np.interp(810.0, wl, eta) ** 2
    assert pair(810.0) == pytest.approx(solo, rel=1e-6)
    # pair efficiency is symmetric under conjugation by construction
    lam = 700.0
    lam_c = conjugate_wavelength_nm(lam, 405.0)
    assert pair(lam) == pytest.approx(pair(lam_c), rel=1e-6)
    assert vals.max() <= eta.max() ** 2 + 1e-12


def test_bandwidth_and_correlation_time():
    bw = bandwidth_hz(200.0, 810.0)
    assert bw == pytest.approx(299792458.0 * 200e-9 / 810e-9 ** 2, rel=1e-12)
    tau = correlation_time(bw)
    assert tau == pytest.approx(1.0 / bw, rel=1e-12)
    assert tau * 1e15 == pytest.approx(10.94, rel=0.01)
    tau_600 = correlation_time(bandwidth_hz(600.0, 810.0))
    assert tau_600 * 1e15 == pytest.approx(3.65, rel=0.01)


def test_simulate_sps_deterministic():
    spec = flat_spectrum()
    h1 = simulate_sps(spec, 160.0, None, 50.0, 5000, seed=5, bin_ps=20.0)
    h2 = simulate_sps(spec, 160.0, None, 50.0, 5000, seed=5, bin_ps=20.0)
    assert np.array_equal(h1.counts, h2.counts)
    assert np.array_equal(h1.bin_edges_ps, h2.bin_edges_ps)
