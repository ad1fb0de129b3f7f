"""Demo 3: pair rate versus crystal thickness without phase matching.

The emission rate of an unmatched crystal oscillates as
L^2 sinc^2(dk L / 2): it peaks at every odd multiple of the coherence
length and vanishes at every even multiple, and all odd-multiple peaks
are equally high. That equality is why a film a few L_c thick is as
bright as one L_c, and why making the crystal thicker does not help.
"""

import csv
from pathlib import Path

import numpy as np

from microspdc import (
    CrystalConfig,
    PumpConfig,
    coherence_length,
    load_material,
    mismatch,
    omega_from_wavelength_nm,
    thickness_scan,
)
from microspdc.kinematics import PhotonMode

OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    pump = PumpConfig(center_wavelength_nm=405.0, waist_m=100e-6)
    crystal = CrystalConfig(thickness_m=1e-6,
                            material=load_material("lithium_niobate_mgo"),
                            d_eff_pm_per_v=40.0)
    w_deg = omega_from_wavelength_nm(810.0)
    signal, idler = PhotonMode(w_deg), PhotonMode(w_deg)

    dk = mismatch(pump, crystal, signal, idler).longitudinal
    lc = coherence_length(dk)
    print(f"coherence length L_c = {lc * 1e6:.4f} um")

    thickness = np.linspace(0.05e-6, 7 * lc, 800)
    rate = thickness_scan(pump, crystal, thickness, signal, idler)
    path = OUT / "thickness_scan.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["thickness_um", "relative_rate"])
        writer.writerows(zip(thickness * 1e6, rate))
    print(f"wrote {path}")

    # exact multiples of L_c show the peak/zero pattern directly
    multiples = lc * np.arange(1, 7)
    at_multiples = thickness_scan(pump, crystal, multiples, signal, idler)
    for m, r in zip(range(1, 7), at_multiples):
        kind = "peak" if m % 2 else "zero"
        print(f"  L = {m} L_c: relative rate = {r:.3e}  ({kind})")


if __name__ == "__main__":
    main()
