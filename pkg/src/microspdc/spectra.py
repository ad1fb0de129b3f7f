"""Frequency-angular emission maps, thickness scans, polarization response.

The map axes are laboratory quantities: signal vacuum wavelength (nm)
and *external* emission angle (degrees). Internally everything is
evaluated at the refracted internal angles; Snell's law is applied at
this module's boundary only.

A grid cell is masked when the momentum-conserving conjugate idler
direction either does not propagate (evanescent) or lies beyond the
idler's internal-reflection angle, so the pair can never be collected
outside the crystal. Masked cells carry intensity 0 plus the flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import (
    omega_from_wavelength_nm,
    refractive_index,
    wavelength_nm_from_omega,
)
from .kinematics import (
    CrystalConfig,
    Mismatch,
    PhotonMode,
    PumpConfig,
    mismatch,
    pair_probability,
    phase_matching_function,
    pump_function,
)

# Width of the idler-angle integration window in units of the pump
# function's angular standard deviation. exp(-32) tail truncation.
_WINDOW_SIGMAS = 8.0


@dataclass
class SpectrumGrid:
    """Rectangular (wavelength x external angle) intensity map.

    intensity has shape (len(wavelength_nm), len(angle_deg)) and is in
    relative units. mask marks cells whose conjugate idler cannot leave
    the crystal (internal-reflection collection limit).
    """

    wavelength_nm: np.ndarray
    angle_deg: np.ndarray
    intensity: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.wavelength_nm = np.asarray(self.wavelength_nm, dtype=float)
        self.angle_deg = np.asarray(self.angle_deg, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if np.any(np.diff(self.wavelength_nm) <= 0):
            raise ValueError("wavelength axis must be strictly ascending")
        if np.any(np.diff(self.angle_deg) <= 0):
            raise ValueError("angle axis must be strictly ascending")
        if self.intensity.shape != (self.wavelength_nm.size, self.angle_deg.size):
            raise ValueError("intensity shape does not match axes")
        if self.mask.shape != self.intensity.shape:
            raise ValueError("mask shape does not match intensity")
        if np.any(self.intensity < 0):
            raise ValueError("intensities must be nonnegative")
        if np.any(self.intensity[self.mask] != 0):
            raise ValueError("masked cells must carry zero intensity")


def critical_angle(n) -> float:
    """Internal-reflection angle asin(1/n) in degrees."""
    if n < 1:
        raise ValueError("refractive index must be >= 1")
    return math.degrees(math.asin(1.0 / n))


def internal_angle_rad(n, external_angle_deg):
    """Internal propagation angle for a ray collected at an external angle."""
    return np.arcsin(np.sin(np.deg2rad(external_angle_deg)) / n)


def external_angle_deg(n, internal_angle_rad_):
    """External angle of a ray leaving at an internal angle; NaN under
    total internal reflection."""
    s = n * np.sin(internal_angle_rad_)
    out = np.where(np.abs(s) <= 1.0, np.degrees(np.arcsin(np.clip(s, -1, 1))),
                   np.nan)
    return out if np.ndim(out) else float(out)


def frequency_angular_map(pump: PumpConfig, crystal: CrystalConfig,
                          wavelength_nm, angle_deg,
                          mode: str = "quadrature",
                          n_nodes: int = 512) -> SpectrumGrid:
    """Signal intensity over (vacuum wavelength, external angle).

    For a CW pump the idler frequency is fixed by energy conservation,
    and each cell holds the idler-angle integral

        I = integral dtheta_i  F_pm(dk_par) * F_p(dk_perp)

    evaluated by trapezoid quadrature with ``n_nodes`` nodes placed on a
    window around the transverse-matching root (dk_perp = 0), sized by
    the pump function's angular width and clipped to the idler
    internal-reflection range. With ``mode="collinear-pump"`` the
    integral is replaced by the integrand at the root (where F_p = 1),
    which is faster and accurate for tight pump focusing; cells with no
    root evaluate to 0.

    Relative units: the d^2 L^2 prefactor is constant over the map and
    omitted.
    """
    if mode not in ("quadrature", "collinear-pump"):
        raise ValueError("mode must be 'quadrature' or 'collinear-pump'")
    if n_nodes < 8:
        raise ValueError("n_nodes must be at least 8")
    wavelength_nm = np.asarray(wavelength_nm, dtype=float)
    angle_deg = np.asarray(angle_deg, dtype=float)
    if np.any(wavelength_nm <= pump.center_wavelength_nm):
        raise ValueError("signal wavelengths must exceed the pump wavelength")

    omega_p = pump.omega0
    k_p = crystal.pump_index(pump.center_wavelength_nm) * omega_p / C_LIGHT
    L = crystal.thickness_m
    w = pump.waist_m

    sin_ext = np.sin(np.deg2rad(angle_deg))
    intensity = np.zeros((wavelength_nm.size, angle_deg.size))
    masked = np.zeros_like(intensity, dtype=bool)

    for row, lam_s in enumerate(wavelength_nm):
        omega_s = omega_from_wavelength_nm(lam_s)
        omega_i = omega_p - omega_s
        lam_i = wavelength_nm_from_omega(omega_i)
        n_s = refractive_index(crystal.material, crystal.signal_axis, lam_s)
        n_i = refractive_index(crystal.material, crystal.idler_axis, lam_i)
        k_s = n_s * omega_s / C_LIGHT
        k_i = n_i * omega_i / C_LIGHT

        theta_s = np.arcsin(sin_ext / n_s)
        # Transverse momentum is conserved across the exit face, so the
        # internal transverse component equals omega_s*sin(theta_ext)/c.
        t_perp = k_s * np.sin(theta_s)
        sin_root = -t_perp / k_i
        evanescent = np.abs(sin_root) > 1.0
        trapped = np.abs(sin_root) > 1.0 / n_i  # includes evanescent
        masked[row] = trapped

        if mode == "collinear-pump":
            theta_root = np.arcsin(np.clip(sin_root, -1.0, 1.0))
            dk_par = (k_s * np.cos(theta_s) + k_i * np.cos(theta_root) - k_p)
            vals = phase_matching_function(dk_par, L)
            vals = np.where(evanescent, 0.0, vals)
        else:
            theta_crit = math.asin(1.0 / n_i)
            theta_root = np.arcsin(np.clip(sin_root, -1.0, 1.0))
            # Angular width of the pump function around the root; the
            # 0.05 floor keeps the window finite for roots near +-pi/2.
            sigma = 1.0 / (math.sqrt(2.0) * k_i * w
                           * np.maximum(np.cos(theta_root), 0.05))
            lo = np.where(evanescent, -theta_crit,
                          np.maximum(theta_root - _WINDOW_SIGMAS * sigma,
                                     -theta_crit))
            hi = np.where(evanescent, theta_crit,
                          np.minimum(theta_root + _WINDOW_SIGMAS * sigma,
                                     theta_crit))
            lo = np.minimum(lo, hi - 1e-12)
            u = np.linspace(0.0, 1.0, n_nodes)
            theta_i = lo[:, None] + (hi - lo)[:, None] * u[None, :]
            dk_perp = t_perp[:, None] + k_i * np.sin(theta_i)
            dk_par = (k_s * np.cos(theta_s)[:, None]
                      + k_i * np.cos(theta_i) - k_p)
            integrand = (phase_matching_function(dk_par, L)
                         * pump_function(dk_perp, w))
            vals = np.trapezoid(integrand, theta_i, axis=1)

        vals = np.where(trapped, 0.0, vals)
        intensity[row] = vals

    return SpectrumGrid(wavelength_nm=wavelength_nm, angle_deg=angle_deg,
                        intensity=intensity, mask=masked)


def thickness_scan(pump: PumpConfig, crystal: CrystalConfig, thicknesses_m,
                   signal: PhotonMode, idler: PhotonMode) -> np.ndarray:
    """Relative pair rate versus crystal thickness at fixed mode pair.

    The wavevector mismatch is fixed by the modes, so the curve is the
    pure d^2 L^2 sinc^2 oscillation: maxima at odd multiples of the
    coherence length, zeros at even multiples.
    """
    thicknesses_m = np.asarray(thicknesses_m, dtype=float)
    if np.any(thicknesses_m <= 0):
        raise ValueError("thicknesses must be positive")
    mm = mismatch(pump, crystal, signal, idler)
    return pair_probability(crystal.d_eff_pm_per_v, thicknesses_m,
                            mm.longitudinal, mm.transverse, pump.waist_m)


def polarization_response(pump_angle_deg, analyzer: str):
    """Relative coincidence rate versus pump polarization angle.

    Only the z component of the pump field drives the dominant
    nonlinearity, so a z-analyzed pair rate follows sin^2(theta) (theta
    measured from the y axis) and a y-analyzed rate vanishes.
    """
    theta = np.deg2rad(np.asarray(pump_angle_deg, dtype=float))
    if analyzer == "z":
        val = np.sin(theta) ** 2
    elif analyzer == "y":
        val = np.zeros_like(theta)
    else:
        raise ValueError("analyzer must be 'y' or 'z'")
    return val if val.ndim else float(val)


def collinear_mismatch(pump: PumpConfig, crystal: CrystalConfig,
                       signal_wavelength_nm) -> Mismatch:
    """Mismatch for the collinear pair (signal at the given wavelength,
    idler at the energy-conserving conjugate)."""
    omega_s = omega_from_wavelength_nm(signal_wavelength_nm)
    omega_i = pump.omega0 - omega_s
    if omega_i <= 0:
        raise ValueError("signal wavelength must exceed the pump wavelength")
    signal = PhotonMode(omega_s, 0.0, crystal.signal_axis)
    idler = PhotonMode(omega_i, 0.0, crystal.idler_axis)
    return mismatch(pump, crystal, signal, idler)


def write_spectrum_csv(grid: SpectrumGrid, path) -> None:
    """Long-format CSV: one row per (wavelength, angle) cell."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("wavelength_nm,external_angle_deg,intensity,masked\n")
        for i, lam in enumerate(grid.wavelength_nm):
            for j, ang in enumerate(grid.angle_deg):
                fh.write(f"{lam:.10g},{ang:.10g},"
                         f"{grid.intensity[i, j]:.10g},"
                         f"{int(grid.mask[i, j])}\n")
