"""Joint spectral intensity, spectral widths, Fedorov ratio, Schmidt number.

The JSI of a collinear pair source with a Gaussian-spectrum pump is

    F(w_s, w_i) = sinc^2(dk_par(w_s, w_i) L / 2)
                  * exp(-((w_s + w_i - w_p0) / sigma)^2 / 2)

where the pump factor is applied once, as an intensity weight. Width
conventions are FWHM throughout (documented, so the Fedorov ratio is
convention-stable), measured as the support at half maximum: the
distance between the outermost half-max crossings with linear
interpolation between grid nodes. A width whose half-max support
reaches the grid edge is flagged range-limited and reported as the grid
span rather than extrapolated.

The Schmidt number is computed from the SVD of the amplitude matrix
sqrt(F). No phase information enters (none is available from intensity
measurements), so K is the zero-phase estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import refractive_index
from .kinematics import CrystalConfig, PumpConfig

_TWO_PI = 2.0 * math.pi


@dataclass
class JointSpectralGrid:
    """Rectangular JSI sample: intensity[i, j] = F(omega_s[j], omega_i[i])."""

    omega_s: np.ndarray
    omega_i: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        self.omega_s = np.asarray(self.omega_s, dtype=float)
        self.omega_i = np.asarray(self.omega_i, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.omega_s.size < 2 or self.omega_i.size < 2:
            raise ValueError("grid must be at least 2x2")
        if np.any(np.diff(self.omega_s) <= 0) or np.any(np.diff(self.omega_i) <= 0):
            raise ValueError("frequency axes must be strictly ascending")
        if self.intensity.shape != (self.omega_i.size, self.omega_s.size):
            raise ValueError("intensity shape must be (len(omega_i), len(omega_s))")
        if not np.all(np.isfinite(self.intensity)):
            raise ValueError("intensities must be finite")
        if np.any(self.intensity < 0):
            raise ValueError("intensities must be nonnegative")


@dataclass(frozen=True)
class Widths:
    """FWHM of the JSI marginal (unconditional) and of the cross-section
    through the global maximum (conditional), in Hz."""

    unconditional_hz: float
    conditional_hz: float
    unconditional_range_limited: bool
    conditional_range_limited: bool


@dataclass(frozen=True)
class EntanglementReport:
    unconditional_width_hz: float
    conditional_width_hz: float
    fedorov_ratio: float
    schmidt_number: float
    unconditional_range_limited: bool = False
    conditional_range_limited: bool = False

    def __post_init__(self):
        if self.unconditional_width_hz <= 0 or self.conditional_width_hz <= 0:
            raise ValueError("widths must be positive")
        if self.schmidt_number < 1.0 - 1e-9:
            raise ValueError("Schmidt number cannot be below 1")


def pump_sigma_for_conditional_width(width_hz: float) -> float:
    """Pump spectral sigma (rad/s) that makes the non-phase-matched JSI
    cross-section FWHM equal ``width_hz``.

    In the flat-phase-matching limit the cross-section is the pump
    Gaussian itself, with FWHM = 2 sqrt(2 ln 2) sigma in rad/s.
    """
    if width_hz <= 0:
        raise ValueError("width must be positive")
    return _TWO_PI * width_hz / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def compute_jsi(pump: PumpConfig, crystal: CrystalConfig,
                omega_s, omega_i) -> JointSpectralGrid:
    """JSI on a rectangular grid for a collinear, finite-bandwidth pump.

    Requires pump.spectral_width > 0; the CW limit has no joint
    *spectral* structure along the pump direction.
    """
    if pump.spectral_width <= 0:
        raise ValueError("compute_jsi needs a finite pump spectral width")
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)

    lam_s_nm = _TWO_PI * C_LIGHT / omega_s * 1e9
    lam_i_nm = _TWO_PI * C_LIGHT / omega_i * 1e9
    n_s = refractive_index(crystal.material, crystal.signal_axis, lam_s_nm)
    n_i = refractive_index(crystal.material, crystal.idler_axis, lam_i_nm)
    k_s = n_s * omega_s / C_LIGHT
    k_i = n_i * omega_i / C_LIGHT

    w_sum = omega_i[:, None] + omega_s[None, :]
    lam_p_nm = _TWO_PI * C_LIGHT / w_sum * 1e9
    n_p = crystal.pump_index(lam_p_nm)
    k_p = n_p * w_sum / C_LIGHT

    dk = k_s[None, :] + k_i[:, None] - k_p
    x = dk * crystal.thickness_m / 2.0
    pm = np.sinc(x / np.pi) ** 2
    detune = (w_sum - pump.omega0) / pump.spectral_width
    intensity = pm * np.exp(-0.5 * detune * detune)
    return JointSpectralGrid(omega_s=omega_s, omega_i=omega_i,
                             intensity=intensity)


def support_fwhm(x, y):
    """Full width at half maximum as the support between the outermost
    half-max crossings, linearly interpolated.

    Returns (width, range_limited); a range-limited width equals the
    axis span because the curve is still at or above half maximum at a
    grid edge.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("x and y must be equal-length, size >= 2")
    ymax = float(y.max())
    if ymax <= 0:
        raise ValueError("curve has no positive values")
    half = ymax / 2.0
    above = y >= half
    if above[0] or above[-1]:
        return float(x[-1] - x[0]), True
    first = int(np.argmax(above))
    last = int(y.size - 1 - np.argmax(above[::-1]))
    x_left = x[first - 1] + (half - y[first - 1]) * (
        (x[first] - x[first - 1]) / (y[first] - y[first - 1]))
    x_right = x[last] + (y[last] - half) * (
        (x[last + 1] - x[last]) / (y[last] - y[last + 1]))
    return float(x_right - x_left), False


def widths(grid: JointSpectralGrid) -> Widths:
    """Unconditional and conditional FWHM of a JSI grid, in Hz.

    Unconditional: FWHM of the marginal over omega_s (idler integrated
    out). Conditional: FWHM of the cross-section at the omega_s of the
    global maximum, taken along omega_i.
    """
    if not np.any(grid.intensity > 0):
        raise ValueError("all-zero grid")
    marginal = np.trapezoid(grid.intensity, grid.omega_i, axis=0)
    w_unc, lim_unc = support_fwhm(grid.omega_s, marginal)
    i_max, j_max = np.unravel_index(int(np.argmax(grid.intensity)),
                                    grid.intensity.shape)
    cross = grid.intensity[:, j_max]
    w_con, lim_con = support_fwhm(grid.omega_i, cross)
    return Widths(unconditional_hz=w_unc / _TWO_PI,
                  conditional_hz=w_con / _TWO_PI,
                  unconditional_range_limited=lim_unc,
                  conditional_range_limited=lim_con)


def fedorov_ratio(unconditional_hz: float, conditional_hz: float) -> float:
    """R = unconditional / conditional width."""
    if conditional_hz <= 0:
        raise ValueError("conditional width must be positive")
    return unconditional_hz / conditional_hz


def schmidt_number(grid: JointSpectralGrid) -> float:
    """Schmidt number K = 1 / sum(p_n^2) from the SVD of sqrt(intensity)."""
    if not np.any(grid.intensity > 0):
        raise ValueError("all-zero grid")
    amplitude = np.sqrt(grid.intensity)
    s = np.linalg.svd(amplitude, compute_uv=False)
    p = s * s
    p = p / p.sum()
    return float(1.0 / np.sum(p * p))


def entanglement_report(grid: JointSpectralGrid) -> EntanglementReport:
    ws = widths(grid)
    return EntanglementReport(
        unconditional_width_hz=ws.unconditional_hz,
        conditional_width_hz=ws.conditional_hz,
        fedorov_ratio=fedorov_ratio(ws.unconditional_hz, ws.conditional_hz),
        schmidt_number=schmidt_number(grid),
        unconditional_range_limited=ws.unconditional_range_limited,
        conditional_range_limited=ws.conditional_range_limited,
    )


def export_jsi(grid: JointSpectralGrid, csv_path, json_path,
               pump: PumpConfig | None = None,
               crystal: CrystalConfig | None = None) -> None:
    """Write the grid as CSV plus a JSON sidecar with axes and measures."""
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("omega_s_rad_s,omega_i_rad_s,intensity\n")
        for i, wi in enumerate(grid.omega_i):
            for j, ws_ in enumerate(grid.omega_s):
                fh.write(f"{ws_:.10g},{wi:.10g},{grid.intensity[i, j]:.10g}\n")
    report = entanglement_report(grid)
    sidecar = {
        "axes": {
            "omega_s_rad_s": {"min": float(grid.omega_s[0]),
                              "max": float(grid.omega_s[-1]),
                              "points": int(grid.omega_s.size)},
            "omega_i_rad_s": {"min": float(grid.omega_i[0]),
                              "max": float(grid.omega_i[-1]),
                              "points": int(grid.omega_i.size)},
        },
        "pump_sigma_rad_s": None if pump is None else pump.spectral_width,
        "crystal_thickness_m": None if crystal is None else crystal.thickness_m,
        "unconditional_width_hz": report.unconditional_width_hz,
        "conditional_width_hz": report.conditional_width_hz,
        "unconditional_range_limited": report.unconditional_range_limited,
        "conditional_range_limited": report.conditional_range_limited,
        "fedorov_ratio": report.fedorov_ratio,
        "schmidt_number": report.schmidt_number,
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
