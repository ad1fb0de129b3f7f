"""Wavevector mismatch and the elementary pair-emission factors.

The geometry is restricted to one transverse dimension: the pump
propagates along the longitudinal axis and signal/idler wavevectors lie
in a single plane, described by internal polar angles. Refraction at the
crystal surface is handled by the spectra module; everything here works
in internal angles.

Internal unit convention: angular frequencies in rad/s, lengths in m,
wavevectors in rad/m. Conversions from lab units (nm, um, degrees)
happen at construction time or at the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import (
    MaterialModel,
    effective_index,
    omega_from_wavelength_nm,
    refractive_index,
)


@dataclass(frozen=True)
class PumpConfig:
    """Pump beam parameters.

    spectral_width is the Gaussian sigma (rad/s) of the pump intensity
    profile in the sum frequency; 0 denotes an ideal CW pump. power is a
    relative scale (all rates in this package are relative), and
    polarization_angle_deg is measured from the y axis, so 90 degrees
    puts the field along the crystal z axis.
    """

    center_wavelength_nm: float
    waist_m: float = 100e-6
    spectral_width: float = 0.0
    power: float = 1.0
    polarization_angle_deg: float = 90.0

    def __post_init__(self):
        if self.center_wavelength_nm <= 0:
            raise ValueError("pump wavelength must be positive")
        if self.waist_m <= 0:
            raise ValueError("pump waist must be positive")
        if self.spectral_width < 0:
            raise ValueError("pump spectral width must be >= 0")
        if self.power < 0:
            raise ValueError("pump power must be >= 0")
        if not 0.0 <= self.polarization_angle_deg < 360.0:
            raise ValueError("polarization angle must lie in [0, 360)")

    @property
    def omega0(self) -> float:
        """Pump center angular frequency (rad/s)."""
        return omega_from_wavelength_nm(self.center_wavelength_nm)


@dataclass(frozen=True)
class CrystalConfig:
    """Nonlinear crystal parameters.

    cut_angle_deg, when set, is the angle between the pump propagation
    direction and the optic axis; the pump then sees the extraordinary
    effective index at that angle (used for angle-tuned birefringent
    phase matching). When None, the pump uses pump_axis directly, which
    is the in-plane configuration where every z-polarized wave sees the
    principal extraordinary index regardless of emission angle.
    """

    thickness_m: float
    material: MaterialModel
    d_eff_pm_per_v: float = 1.0
    pump_axis: str = "e"
    signal_axis: str = "e"
    idler_axis: str = "e"
    cut_angle_deg: float | None = None

    def __post_init__(self):
        if self.thickness_m <= 0:
            raise ValueError("crystal thickness must be positive")
        if self.d_eff_pm_per_v <= 0:
            raise ValueError("d_eff must be positive")
        for axis in (self.pump_axis, self.signal_axis, self.idler_axis):
            if axis not in ("e", "o", "iso"):
                raise ValueError(f"unknown polarization axis {axis!r}")
        if self.cut_angle_deg is not None and not (
                0.0 <= self.cut_angle_deg <= 90.0):
            raise ValueError("cut angle must lie in [0, 90] degrees")

    def pump_index(self, wavelength_nm):
        if self.cut_angle_deg is not None:
            return effective_index(self.material, wavelength_nm,
                                   self.cut_angle_deg)
        return refractive_index(self.material, self.pump_axis, wavelength_nm)


@dataclass(frozen=True)
class PhotonMode:
    """A daughter-photon plane-wave mode inside the crystal."""

    angular_frequency: float
    internal_angle_rad: float = 0.0
    axis: str = "e"

    def __post_init__(self):
        if self.angular_frequency <= 0:
            raise ValueError("mode frequency must be positive")
        if not abs(self.internal_angle_rad) < math.pi / 2:
            raise ValueError("internal angle must satisfy |angle| < pi/2")


@dataclass(frozen=True)
class Mismatch:
    """Longitudinal and transverse wavevector mismatch (rad/m)."""

    longitudinal: float
    transverse: float

    def __post_init__(self):
        if not (math.isfinite(self.longitudinal)
                and math.isfinite(self.transverse)):
            raise ValueError("mismatch components must be finite")


def mismatch(pump: PumpConfig, crystal: CrystalConfig,
             signal: PhotonMode, idler: PhotonMode) -> Mismatch:
    """Wavevector mismatch of a signal/idler mode pair.

    The pump wave is collinear with the longitudinal axis and is
    evaluated at the sum frequency omega_s + omega_i, so energy
    conservation is built in:

        dk_par  = k_s cos(t_s) + k_i cos(t_i) - k_p
        dk_perp = k_s sin(t_s) + k_i sin(t_i)
    """
    mat = crystal.material
    omega_p = signal.angular_frequency + idler.angular_frequency

    def k_of(mode: PhotonMode) -> float:
        lam_nm = 2.0 * np.pi * C_LIGHT / mode.angular_frequency * 1e9
        n = refractive_index(mat, mode.axis, lam_nm)
        return n * mode.angular_frequency / C_LIGHT

    lam_p_nm = 2.0 * np.pi * C_LIGHT / omega_p * 1e9
    k_p = crystal.pump_index(lam_p_nm) * omega_p / C_LIGHT
    k_s = k_of(signal)
    k_i = k_of(idler)
    dk_par = (k_s * math.cos(signal.internal_angle_rad)
              + k_i * math.cos(idler.internal_angle_rad) - k_p)
    dk_perp = (k_s * math.sin(signal.internal_angle_rad)
               + k_i * math.sin(idler.internal_angle_rad))
    return Mismatch(longitudinal=dk_par, transverse=dk_perp)


def phase_matching_function(dk_longitudinal, thickness_m):
    """sinc^2(dk_par * L / 2), the longitudinal interference factor.

    sinc(x) = sin(x)/x with sinc(0) = 1; the result lies in [0, 1].
    """
    L = np.asarray(thickness_m, dtype=float)
    if np.any(L <= 0):
        raise ValueError("thickness must be positive")
    x = np.asarray(dk_longitudinal, dtype=float) * L / 2.0
    val = np.sinc(x / np.pi) ** 2
    return val if val.ndim else float(val)


def pump_function(dk_transverse, waist_m):
    """exp(-(dk_perp * w)^2), the transverse momentum acceptance."""
    if np.any(np.asarray(waist_m) <= 0):
        raise ValueError("waist must be positive")
    val = np.exp(-(np.asarray(dk_transverse, dtype=float) * waist_m) ** 2)
    return val if val.ndim else float(val)


def pair_probability(d_eff_pm_per_v, thickness_m, dk_longitudinal,
                     dk_transverse, waist_m):
    """Relative pair-emission probability d^2 L^2 F_pm F_p.

    Arbitrary units: this package never predicts absolute rates, only
    ratios and shapes, so no vacuum-field prefactor is included.
    """
    d = np.asarray(d_eff_pm_per_v, dtype=float)
    L = np.asarray(thickness_m, dtype=float)
    val = (d * d * L * L
           * phase_matching_function(dk_longitudinal, thickness_m)
           * pump_function(dk_transverse, waist_m))
    return val if val.ndim else float(val)


def coherence_length(dk_longitudinal) -> float:
    """Coherence length pi/|dk_par| in meters.

    Exact phase matching (dk_par = 0) is reported as math.inf, the
    distinguished "phase-matched" sentinel, rather than an error.
    """
    if dk_longitudinal == 0:
        return math.inf
    return math.pi / abs(dk_longitudinal)
