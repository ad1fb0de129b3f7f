"""Single-photon spectroscopy through a dispersive fiber, virtualized.

Photon pairs are sampled from a spectrum, each photon accumulates the
group delay of a long run of fused silica (the fiber is modeled as bulk
material; modal dispersion is out of scope), and the arrival-time
difference

    dt = tau(lambda_signal) - tau(lambda_idler) + jitter

is histogrammed. A cubic calibration curve fitted to known filter
positions maps dt back to wavelength, and the histogram is converted to
a spectrum by a change of variables that conserves counts exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import MaterialModel, group_delay, load_material
from .jsi import JointSpectralGrid, support_fwhm

_TWO_PI = 2.0 * math.pi


def conjugate_wavelength_nm(wavelength_nm, pump_wavelength_nm):
    """Energy-conserving partner wavelength: 1/l_i = 1/l_p - 1/l_s."""
    inv = 1.0 / pump_wavelength_nm - 1.0 / np.asarray(wavelength_nm, dtype=float)
    if np.any(inv <= 0):
        raise ValueError("wavelength must exceed the pump wavelength")
    out = 1.0 / inv
    return out if np.ndim(out) else float(out)


@dataclass
class Spectrum1D:
    """Signal-wavelength spectral density of a CW-pumped pair source.

    The idler of each sampled signal photon sits at the conjugate
    wavelength, so a 1-D density fully specifies the pair ensemble.
    """

    wavelength_nm: np.ndarray
    density: np.ndarray
    pump_wavelength_nm: float

    def __post_init__(self):
        self.wavelength_nm = np.asarray(self.wavelength_nm, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if np.any(np.diff(self.wavelength_nm) <= 0):
            raise ValueError("wavelength axis must be strictly ascending")
        if self.wavelength_nm.shape != self.density.shape:
            raise ValueError("axis and density must align")
        if np.any(self.density < 0):
            raise ValueError("density must be nonnegative")


@dataclass
class EfficiencyWindow:
    """Pair-detection efficiency versus signal wavelength, in [0, 1].

    This is the *pair* efficiency eta(lambda) * eta(conjugate lambda);
    use :func:`mirrored_window` to build it from a detector curve.
    Outside the tabulated range the efficiency is 0.
    """

    wavelength_nm: np.ndarray
    efficiency: np.ndarray

    def __post_init__(self):
        self.wavelength_nm = np.asarray(self.wavelength_nm, dtype=float)
        self.efficiency = np.asarray(self.efficiency, dtype=float)
        if np.any(np.diff(self.wavelength_nm) <= 0):
            raise ValueError("wavelength axis must be strictly ascending")
        if self.wavelength_nm.shape != self.efficiency.shape:
            raise ValueError("axis and efficiency must align")
        if np.any(self.efficiency < 0) or np.any(self.efficiency > 1):
            raise ValueError("efficiencies must lie in [0, 1]")

    def __call__(self, wavelength_nm):
        return np.interp(np.asarray(wavelength_nm, dtype=float),
                         self.wavelength_nm, self.efficiency,
                         left=0.0, right=0.0)


def mirrored_window(detector_wavelength_nm, detector_efficiency,
                    pump_wavelength_nm) -> EfficiencyWindow:
    """Pair efficiency eta(l) * eta(conj l) from a detector curve."""
    wl = np.asarray(detector_wavelength_nm, dtype=float)
    eta = np.clip(np.asarray(detector_efficiency, dtype=float), 0.0, 1.0)
    eta_self = eta
    eta_conj = np.interp(conjugate_wavelength_nm(wl, pump_wavelength_nm),
                         wl, eta, left=0.0, right=0.0)
    return EfficiencyWindow(wavelength_nm=wl, efficiency=eta_self * eta_conj)


def gaussian_window(center_nm, fwhm_nm, wavelength_nm) -> EfficiencyWindow:
    """Gaussian pair-efficiency window (a parametrized stand-in for an
    unpublished detector curve)."""
    wl = np.asarray(wavelength_nm, dtype=float)
    sigma = fwhm_nm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    return EfficiencyWindow(wavelength_nm=wl,
                            efficiency=np.exp(-0.5 * ((wl - center_nm) / sigma) ** 2))


def delay_difference_ps(signal_wavelength_nm, pump_wavelength_nm,
                        fiber_length_m, material: MaterialModel | None = None):
    """Signal-minus-idler group delay (ps) after the dispersive fiber."""
    mat = material or load_material("fused_silica")
    lam_i = conjugate_wavelength_nm(signal_wavelength_nm, pump_wavelength_nm)
    tau_s = group_delay(mat, "iso", signal_wavelength_nm, fiber_length_m)
    tau_i = group_delay(mat, "iso", lam_i, fiber_length_m)
    return (np.asarray(tau_s) - np.asarray(tau_i)) * 1e12


@dataclass
class DtHistogram:
    """Arrival-time-difference histogram."""

    bin_edges_ps: np.ndarray
    counts: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def centers_ps(self) -> np.ndarray:
        return 0.5 * (self.bin_edges_ps[:-1] + self.bin_edges_ps[1:])


def simulate_sps(spectrum, fiber_length_m: float = 160.0,
                 efficiency: EfficiencyWindow | None = None,
                 detector_jitter_ps: float = 50.0,
                 n_pairs: int = 100_000, seed=0,
                 bin_ps: float = 10.0,
                 material: MaterialModel | None = None) -> DtHistogram:
    """Sample pairs from a spectrum and histogram their delay differences.

    ``spectrum`` is either a :class:`Spectrum1D` (idler at the conjugate
    wavelength) or a :class:`JointSpectralGrid` (cells sampled by
    intensity). The efficiency window weights the sampling; each photon
    receives independent Gaussian detector jitter.
    """
    if fiber_length_m <= 0:
        raise ValueError("fiber length must be positive")
    if detector_jitter_ps < 0:
        raise ValueError("jitter must be nonnegative")
    if n_pairs < 1:
        raise ValueError("n_pairs must be positive")
    if bin_ps <= 0:
        raise ValueError("bin width must be positive")
    mat = material or load_material("fused_silica")
    rng = np.random.default_rng(seed)

    if isinstance(spectrum, Spectrum1D):
        lam_s_axis = spectrum.wavelength_nm
        weights = spectrum.density.copy()
        if efficiency is not None:
            weights = weights * efficiency(lam_s_axis)
        if not np.any(weights > 0):
            raise ValueError("spectrum has no weight inside the window")
        p = weights / weights.sum()
        idx = rng.choice(lam_s_axis.size, size=n_pairs, p=p)
        lam_s = lam_s_axis[idx]
        lam_i = conjugate_wavelength_nm(lam_s, spectrum.pump_wavelength_nm)
    elif isinstance(spectrum, JointSpectralGrid):
        lam_s_axis = _TWO_PI * C_LIGHT / spectrum.omega_s * 1e9
        lam_i_axis = _TWO_PI * C_LIGHT / spectrum.omega_i * 1e9
        weights = spectrum.intensity.copy()
        if efficiency is not None:
            weights = weights * efficiency(lam_s_axis)[None, :]
        flat = weights.ravel()
        if not np.any(flat > 0):
            raise ValueError("spectrum has no weight inside the window")
        p = flat / flat.sum()
        cell = rng.choice(flat.size, size=n_pairs, p=p)
        i, j = np.unravel_index(cell, weights.shape)
        lam_s = lam_s_axis[j]
        lam_i = lam_i_axis[i]
    else:
        raise TypeError("spectrum must be Spectrum1D or JointSpectralGrid")

    tau_s = group_delay(mat, "iso", lam_s, fiber_length_m) * 1e12
    tau_i = group_delay(mat, "iso", lam_i, fiber_length_m) * 1e12
    dt = (np.asarray(tau_s) - np.asarray(tau_i)
          + rng.normal(0.0, detector_jitter_ps, n_pairs)
          - rng.normal(0.0, detector_jitter_ps, n_pairs))

    lo = math.floor(dt.min() / bin_ps) * bin_ps - bin_ps / 2.0
    n_bins = int(math.ceil((dt.max() - lo) / bin_ps)) + 1
    edges = lo + bin_ps * np.arange(n_bins + 1)
    counts, _ = np.histogram(dt, edges)
    return DtHistogram(bin_edges_ps=edges, counts=counts, metadata={
        "fiber_length_m": fiber_length_m,
        "detector_jitter_ps": detector_jitter_ps,
        "n_pairs": n_pairs,
        "seed": seed,
        "material": mat.name,
    })


@dataclass
class CalibrationCurve:
    """Cubic map from delay difference (ps) to wavelength (nm)."""

    coefficients: np.ndarray          # numpy polyval order (highest first)
    residual_rms_nm: float
    points: tuple                     # ((wavelength_nm, dt_ps), ...)
    monotonic: bool

    def wavelength_nm(self, dt_ps):
        out = np.polyval(self.coefficients, np.asarray(dt_ps, dtype=float))
        return out if np.ndim(out) else float(out)

    @property
    def span_ps(self):
        dts = [p[1] for p in self.points]
        return min(dts), max(dts)


def calibrate(points) -> CalibrationCurve:
    """Least-squares cubic fit of wavelength versus measured peak delay.

    ``points`` is a sequence of (filter_center_nm, peak_dt_ps) with at
    least 4 distinct delays (fewer would make the cubic rank-deficient).
    A non-monotonic fit over the calibrated span is flagged, not
    rejected: it cannot be inverted bin-by-bin reliably.
    """
    pts = tuple((float(w), float(t)) for w, t in points)
    dts = np.array([p[1] for p in pts])
    wls = np.array([p[0] for p in pts])
    if np.unique(dts).size < 4:
        raise ValueError("calibration needs at least 4 distinct delay points")
    order = np.argsort(dts)
    dts, wls = dts[order], wls[order]
    coeffs = np.polyfit(dts, wls, 3)
    fit = np.polyval(coeffs, dts)
    residual = float(np.sqrt(np.mean((fit - wls) ** 2)))
    deriv = np.polyder(coeffs)
    span = np.linspace(dts[0], dts[-1], 512)
    dsign = np.sign(np.polyval(deriv, span))
    monotonic = bool(np.all(dsign >= 0) or np.all(dsign <= 0))
    return CalibrationCurve(coefficients=coeffs, residual_rms_nm=residual,
                            points=tuple(zip(wls.tolist(), dts.tolist())),
                            monotonic=monotonic)


@dataclass
class SpsSpectrum:
    """Spectrum reconstructed from a delay histogram."""

    wavelength_nm: np.ndarray
    density_per_nm: np.ndarray
    bin_counts: np.ndarray
    n_excluded_bins: int

    def fwhm_nm(self):
        width, limited = support_fwhm(self.wavelength_nm, self.density_per_nm)
        return width, limited


def reconstruct_spectrum(histogram: DtHistogram,
                         calibration: CalibrationCurve) -> SpsSpectrum:
    """Map a delay histogram to a wavelength spectrum.

    Each bin's edges are mapped through the calibration cubic and the
    counts are divided by the resulting wavelength width (the Jacobian
    of the change of variables), so integrated intensity is conserved
    exactly. Bins outside the calibrated delay span are excluded and
    counted in ``n_excluded_bins``.
    """
    lo, hi = calibration.span_ps
    edges = histogram.bin_edges_ps
    left, right = edges[:-1], edges[1:]
    keep = (left >= lo) & (right <= hi)
    lam_left = calibration.wavelength_nm(left[keep])
    lam_right = calibration.wavelength_nm(right[keep])
    dlam = np.abs(lam_right - lam_left)
    good = dlam > 0
    keep_idx = np.flatnonzero(keep)[good]
    counts = histogram.counts[keep_idx].astype(float)
    centers = 0.5 * (lam_left + lam_right)[good]
    density = counts / dlam[good]
    order = np.argsort(centers)
    n_excluded = int(histogram.counts.size - keep_idx.size)
    return SpsSpectrum(wavelength_nm=centers[order],
                       density_per_nm=density[order],
                       bin_counts=counts[order],
                       n_excluded_bins=n_excluded)


def bandwidth_hz(fwhm_nm, center_nm) -> float:
    """Spectral width in Hz of a wavelength interval at a center: c dl/l^2."""
    if fwhm_nm <= 0 or center_nm <= 0:
        raise ValueError("widths and centers must be positive")
    return C_LIGHT * (fwhm_nm * 1e-9) / (center_nm * 1e-9) ** 2


def correlation_time(spectral_width_hz) -> float:
    """Two-photon correlation time, inverse of the spectral width (FWHM
    convention: tau_c = 1 / dnu)."""
    if spectral_width_hz <= 0:
        raise ValueError("spectral width must be positive")
    return 1.0 / spectral_width_hz
