"""Photon-pair generation in phase-matched and ultrathin nonlinear crystals.

Simulates spontaneous parametric down-conversion spectra, joint
spectral intensities and entanglement measures, coincidence-counting
statistics, and three virtual measurement procedures: two-detector
(HBT) counting, dispersive-fiber single-photon spectroscopy, and
stimulated-emission tomography.
"""

from .dispersion import (
    ENV_MATERIAL_DIR,
    MaterialModel,
    WavelengthRangeError,
    available_materials,
    effective_index,
    group_delay,
    group_index,
    load_material,
    omega_from_wavelength_nm,
    refractive_index,
    wavelength_nm_from_omega,
    wavenumber,
)
from .kinematics import (
    CrystalConfig,
    Mismatch,
    PhotonMode,
    PumpConfig,
    coherence_length,
    mismatch,
    pair_probability,
    phase_matching_function,
    pump_function,
)
from .spectra import (
    SpectrumGrid,
    collinear_mismatch,
    critical_angle,
    frequency_angular_map,
    polarization_response,
    thickness_scan,
)
from .jsi import (
    EntanglementReport,
    JointSpectralGrid,
    compute_jsi,
    entanglement_report,
    fedorov_ratio,
    pump_sigma_for_conditional_width,
    schmidt_number,
    support_fwhm,
    widths,
)
from .counting import (
    CountSummary,
    G2Curve,
    HbtConfig,
    TimeTagStream,
    coincidence_histogram,
    measure,
    power_sweep,
    summarize,
    synthesize_stream,
)
from .sps import (
    CalibrationCurve,
    DtHistogram,
    EfficiencyWindow,
    Spectrum1D,
    bandwidth_hz,
    calibrate,
    correlation_time,
    reconstruct_spectrum,
    simulate_sps,
)
from .tomography import (
    ComparisonResult,
    SetScanConfig,
    compare_jsi,
    simulate_set,
    stimulated_spectra,
)

__version__ = "0.1.0"
