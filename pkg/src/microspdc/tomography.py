"""Stimulated-emission tomography: seed-scan reconstruction of the JSI.

Seeding the idler mode at omega_seed stimulates emission into the
conjugate signal spectrum; in the low-gain regime the recorded spectrum
is proportional to the JSI cross-section F(omega_s, omega_i=omega_seed)
blurred by the spectrometer resolution. Stacking one spectrum per seed
frequency reconstructs the JSI fragment inside the scan window.

Gain is treated as linear in seed power and temporal pump-seed overlap
as perfect, so absolute scaling is normalized away. An optional
artifact adds the seed's second harmonic: a faint line at
omega_s = 2 * omega_seed whose tilt has the opposite sign to the JSI
stripe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.interpolate import RegularGridInterpolator

from .dispersion import omega_from_wavelength_nm
from .jsi import JointSpectralGrid, compute_jsi
from .kinematics import CrystalConfig, PumpConfig

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SetScanConfig:
    """Seed scan and spectrometer parameters."""

    seed_start_nm: float = 1500.0
    seed_stop_nm: float = 1620.0
    seed_step_nm: float = 1.0
    spectrometer_resolution_nm: float = 1.0
    include_seed_shg: bool = False
    shg_relative_intensity: float = 0.02

    def __post_init__(self):
        if self.seed_start_nm >= self.seed_stop_nm:
            raise ValueError("seed range must be ascending")
        if self.seed_step_nm <= 0:
            raise ValueError("seed step must be positive")
        if self.spectrometer_resolution_nm <= 0:
            raise ValueError("spectrometer resolution must be positive")
        if self.shg_relative_intensity < 0:
            raise ValueError("artifact intensity must be nonnegative")

    def seed_wavelengths_nm(self) -> np.ndarray:
        n = int(math.floor((self.seed_stop_nm - self.seed_start_nm)
                           / self.seed_step_nm + 1e-9)) + 1
        return self.seed_start_nm + self.seed_step_nm * np.arange(n)


def _resolution_sigma_rad_s(resolution_nm: float, omega_s: np.ndarray) -> float:
    # Convert the spectrometer FWHM from nm to rad/s at the center of the
    # signal axis; the window is narrow enough for one kernel width.
    w_center = 0.5 * (omega_s[0] + omega_s[-1])
    lam_center_m = _TWO_PI * C_LIGHT / w_center
    dw_per_dlam = _TWO_PI * C_LIGHT / lam_center_m ** 2  # |d omega / d lambda|
    fwhm_rad_s = resolution_nm * 1e-9 * dw_per_dlam
    return fwhm_rad_s / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def stimulated_spectra(jsi_grid: JointSpectralGrid, resolution_nm: float,
                       include_seed_shg: bool = False,
                       shg_relative_intensity: float = 0.02) -> JointSpectralGrid:
    """Apply the spectrometer forward map to a JSI sampled on seed rows.

    Each row (fixed omega_i = seed) is convolved along omega_s with a
    Gaussian kernel of FWHM equal to the resolution. The map is linear
    in the input grid; the optional second-harmonic artifact is additive
    instrument light, scaled to each row's maximum, and is not part of
    the linear map.
    """
    if resolution_nm <= 0:
        raise ValueError("resolution must be positive")
    omega_s = jsi_grid.omega_s
    step = float(np.mean(np.diff(omega_s)))
    sigma = _resolution_sigma_rad_s(resolution_nm, omega_s)
    sigma_cells = sigma / step

    out = jsi_grid.intensity.astype(float).copy()
    if sigma_cells >= 0.25:
        radius = max(1, int(math.ceil(5.0 * sigma_cells)))
        x = np.arange(-radius, radius + 1, dtype=float)
        kernel = np.exp(-0.5 * (x / sigma_cells) ** 2)
        kernel /= kernel.sum()
        for r in range(out.shape[0]):
            out[r] = np.convolve(out[r], kernel, mode="same")
    # sub-cell kernels degrade to the identity

    if include_seed_shg:
        line_sigma = max(sigma, 0.25 * step)
        for r, w_seed in enumerate(jsi_grid.omega_i):
            peak = out[r].max()
            if peak <= 0:
                continue
            w_shg = 2.0 * w_seed
            line = np.exp(-0.5 * ((omega_s - w_shg) / line_sigma) ** 2)
            out[r] = out[r] + shg_relative_intensity * peak * line

    return JointSpectralGrid(omega_s=omega_s, omega_i=jsi_grid.omega_i,
                             intensity=out)


def simulate_set(config: SetScanConfig, pump: PumpConfig,
                 crystal: CrystalConfig, omega_s) -> JointSpectralGrid:
    """Run the virtual seed scan: one stimulated spectrum per seed.

    The returned grid's omega_i axis is exactly the seed frequencies
    (ascending), so the reconstruction never extends outside the scan
    window.
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_seed = np.sort(omega_from_wavelength_nm(config.seed_wavelengths_nm()))
    true_jsi = compute_jsi(pump, crystal, omega_s, omega_seed)
    return stimulated_spectra(true_jsi, config.spectrometer_resolution_nm,
                              config.include_seed_shg,
                              config.shg_relative_intensity)


@dataclass(frozen=True)
class ComparisonResult:
    rms: float
    omega_s_bounds: tuple
    omega_i_bounds: tuple


def compare_jsi(direct: JointSpectralGrid,
                reconstructed: JointSpectralGrid) -> ComparisonResult:
    """Normalized RMS difference of two JSI grids on their overlap.

    Both grids are peak-normalized over the overlap region; the direct
    grid is interpolated onto the reconstructed grid's nodes there.
    """
    s_lo = max(direct.omega_s[0], reconstructed.omega_s[0])
    s_hi = min(direct.omega_s[-1], reconstructed.omega_s[-1])
    i_lo = max(direct.omega_i[0], reconstructed.omega_i[0])
    i_hi = min(direct.omega_i[-1], reconstructed.omega_i[-1])
    if s_lo >= s_hi or i_lo >= i_hi:
        raise ValueError("grids do not overlap")
    sel_s = (reconstructed.omega_s >= s_lo) & (reconstructed.omega_s <= s_hi)
    sel_i = (reconstructed.omega_i >= i_lo) & (reconstructed.omega_i <= i_hi)
    if sel_s.sum() < 2 or sel_i.sum() < 2:
        raise ValueError("overlap contains fewer than 2x2 nodes")
    ws = reconstructed.omega_s[sel_s]
    wi = reconstructed.omega_i[sel_i]
    recon = reconstructed.intensity[np.ix_(sel_i, sel_s)]
    interp = RegularGridInterpolator((direct.omega_i, direct.omega_s),
                                     direct.intensity, method="linear")
    mesh_i, mesh_s = np.meshgrid(wi, ws, indexing="ij")
    ref = interp(np.stack([mesh_i.ravel(), mesh_s.ravel()], axis=-1))
    ref = ref.reshape(recon.shape)
    ref_peak = ref.max()
    recon_peak = recon.max()
    if ref_peak <= 0 or recon_peak <= 0:
        raise ValueError("a grid is zero over the overlap")
    diff = recon / recon_peak - ref / ref_peak
    return ComparisonResult(rms=float(np.sqrt(np.mean(diff * diff))),
                            omega_s_bounds=(float(s_lo), float(s_hi)),
                            omega_i_bounds=(float(i_lo), float(i_hi)))
