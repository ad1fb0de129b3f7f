"""Refractive index, wavenumber, and group delay for the shipped materials.

Materials are described by small text files (``data/materials/*.txt``)
holding Sellmeier coefficients per polarization axis together with a
validity wavelength range. Evaluation outside that range raises
:class:`WavelengthRangeError` instead of silently extrapolating.

All evaluation functions are pure: identical inputs give bit-identical
outputs, so they are safe to call concurrently.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.constants import c as C_LIGHT

# Environment variable naming a directory searched for material files
# before the packaged defaults.
ENV_MATERIAL_DIR = "MICROSPDC_MATERIALS"

# Finite-difference step for dn/dlambda used by the group-index routines.
# The error from this choice is far below the dispersion-model uncertainty.
GROUP_INDEX_STEP_NM = 0.1

_AXES = ("o", "e", "iso")
_FORMS = ("constant", "sellmeier_um2", "sellmeier_um")


class WavelengthRangeError(ValueError):
    """Raised when a wavelength falls outside a material's validity range."""


@dataclass(frozen=True)
class AxisModel:
    """Dispersion curve for one polarization axis.

    form: one of
        ``constant``      n = b  (single term)
        ``sellmeier_um2`` n^2 = 1 + sum b*l^2/(l^2 - c), c in um^2
        ``sellmeier_um``  n^2 = 1 + sum b*l^2/(l^2 - c^2), c in um
    with the wavelength ``l`` in micrometers.
    """

    form: str
    terms: tuple
    range_nm: tuple

    def evaluate(self, wavelength_nm):
        lam = np.asarray(wavelength_nm, dtype=float) / 1000.0
        if self.form == "constant":
            n = np.full(lam.shape, float(self.terms[0][0]))
        else:
            l2 = lam * lam
            n2 = np.ones_like(l2)
            for b, c in self.terms:
                if self.form == "sellmeier_um":
                    c = c * c
                n2 = n2 + b * l2 / (l2 - c)
            n = np.sqrt(n2)
        return n if n.ndim else float(n)


@dataclass(frozen=True)
class MaterialModel:
    """Named dispersion model with one curve per polarization axis."""

    name: str
    axes: dict = field(compare=False)

    def axis_model(self, axis: str) -> AxisModel:
        # Isotropic materials answer for any requested axis.
        if axis in self.axes:
            return self.axes[axis]
        if "iso" in self.axes:
            return self.axes["iso"]
        raise KeyError(
            f"material {self.name!r} has no axis {axis!r}; "
            f"available: {sorted(self.axes)}"
        )

    def check_range(self, axis: str, wavelength_nm) -> None:
        lo, hi = self.axis_model(axis).range_nm
        lam = np.asarray(wavelength_nm, dtype=float)
        if np.any(lam < lo) or np.any(lam > hi):
            bad = lam[(lam < lo) | (lam > hi)]
            worst = float(bad.flat[0])
            raise WavelengthRangeError(
                f"{self.name}: wavelength {worst:.6g} nm outside validity "
                f"range [{lo:g}, {hi:g}] nm"
            )


def refractive_index(material: MaterialModel, axis: str, wavelength_nm):
    """Refractive index at ``wavelength_nm`` (scalar or array).

    Raises WavelengthRangeError outside the model's validity range.
    """
    material.check_range(axis, wavelength_nm)
    return material.axis_model(axis).evaluate(wavelength_nm)


def effective_index(material: MaterialModel, wavelength_nm, angle_to_axis_deg):
    """Extraordinary-wave index at an angle to the optic axis of a uniaxial
    crystal: 1/n^2 = cos^2(t)/n_o^2 + sin^2(t)/n_e^2."""
    n_o = refractive_index(material, "o", wavelength_nm)
    n_e = refractive_index(material, "e", wavelength_nm)
    t = np.deg2rad(angle_to_axis_deg)
    inv2 = (np.cos(t) / n_o) ** 2 + (np.sin(t) / n_e) ** 2
    n = 1.0 / np.sqrt(inv2)
    return n if np.ndim(n) else float(n)


def wavenumber(material: MaterialModel, axis: str, angular_frequency):
    """k = n(omega) * omega / c in rad/m for angular frequency in rad/s."""
    omega = np.asarray(angular_frequency, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("angular frequency must be positive")
    lam_nm = wavelength_nm_from_omega(omega)
    n = refractive_index(material, axis, lam_nm)
    k = n * omega / C_LIGHT
    return k if k.ndim else float(k)


def group_index(material: MaterialModel, axis: str, wavelength_nm,
                step_nm: float = GROUP_INDEX_STEP_NM):
    """Group index n_g = n - lambda * dn/dlambda.

    The derivative is a centered finite difference with step ``step_nm``;
    the stencil must stay inside the validity range.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    n_plus = refractive_index(material, axis, lam + step_nm)
    n_minus = refractive_index(material, axis, lam - step_nm)
    n = refractive_index(material, axis, lam)
    dn_dlam = (n_plus - n_minus) / (2.0 * step_nm)
    ng = n - lam * dn_dlam
    return ng if np.ndim(ng) else float(ng)


def group_delay(material: MaterialModel, axis: str, wavelength_nm,
                propagation_length_m, step_nm: float = GROUP_INDEX_STEP_NM):
    """Group delay tau = L * n_g / c in seconds over ``propagation_length_m``."""
    if np.any(np.asarray(propagation_length_m) <= 0):
        raise ValueError("propagation length must be positive")
    ng = group_index(material, axis, wavelength_nm, step_nm)
    tau = np.asarray(propagation_length_m, dtype=float) * ng / C_LIGHT
    return tau if np.ndim(tau) else float(tau)


# ---------------------------------------------------------------------------
# unit helpers (internal convention: angular frequency rad/s, lengths m)

def omega_from_wavelength_nm(wavelength_nm):
    """Vacuum angular frequency (rad/s) for a wavelength in nm."""
    lam = np.asarray(wavelength_nm, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("wavelength must be positive")
    w = 2.0 * np.pi * C_LIGHT / (lam * 1e-9)
    return w if w.ndim else float(w)


def wavelength_nm_from_omega(angular_frequency):
    """Vacuum wavelength (nm) for an angular frequency in rad/s."""
    omega = np.asarray(angular_frequency, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("angular frequency must be positive")
    lam = 2.0 * np.pi * C_LIGHT / omega * 1e9
    return lam if lam.ndim else float(lam)


def hz_from_omega(angular_frequency):
    """Ordinary frequency (Hz) from angular frequency (rad/s)."""
    return np.asarray(angular_frequency, dtype=float) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# material file parsing

def _parse_material_text(text: str, source: str) -> MaterialModel:
    name = None
    axes = {}
    current_axis = None
    block = None

    def close_block():
        if current_axis is None:
            return
        if block["form"] is None or block["range"] is None or not block["terms"]:
            raise ValueError(
                f"{source}: axis {current_axis!r} is missing form, range_nm, "
                "or term entries"
            )
        axes[current_axis] = AxisModel(
            form=block["form"],
            terms=tuple(block["terms"]),
            range_nm=block["range"],
        )

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key: value', got {raw!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "name":
            if name is not None:
                raise ValueError(f"{source}:{lineno}: duplicate name")
            name = value
        elif key == "axis":
            close_block()
            if value not in _AXES:
                raise ValueError(f"{source}:{lineno}: axis must be one of {_AXES}")
            if value in axes:
                raise ValueError(f"{source}:{lineno}: duplicate axis {value!r}")
            current_axis = value
            block = {"form": None, "range": None, "terms": []}
        elif key in ("form", "range_nm", "term"):
            if current_axis is None:
                raise ValueError(f"{source}:{lineno}: {key!r} before any axis")
            if key == "form":
                if value not in _FORMS:
                    raise ValueError(f"{source}:{lineno}: form must be one of {_FORMS}")
                block["form"] = value
            elif key == "range_nm":
                parts = value.split()
                if len(parts) != 2:
                    raise ValueError(f"{source}:{lineno}: range_nm needs two numbers")
                lo, hi = float(parts[0]), float(parts[1])
                if not lo < hi:
                    raise ValueError(f"{source}:{lineno}: range_nm must be ascending")
                block["range"] = (lo, hi)
            else:
                coeffs = tuple(float(p) for p in value.split())
                if not coeffs:
                    raise ValueError(f"{source}:{lineno}: empty term")
                block["terms"].append(coeffs)
        else:
            # Strict schema: anything unrecognized is a hard error.
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")

    close_block()
    if name is None:
        raise ValueError(f"{source}: missing 'name' entry")
    if not axes:
        raise ValueError(f"{source}: no axis blocks")
    for axis, model in axes.items():
        if model.form == "constant" and len(model.terms[0]) != 1:
            raise ValueError(f"{source}: constant form takes a single value")
        if model.form != "constant":
            for t in model.terms:
                if len(t) != 2:
                    raise ValueError(f"{source}: {model.form} terms take two values")
    return MaterialModel(name=name, axes=axes)


def _packaged_material_dir():
    return resources.files(__package__).joinpath("data", "materials")


def _search_paths(name: str, directory):
    fname = f"{name}.txt"
    if directory is not None:
        yield os.path.join(directory, fname)
    env_dir = os.environ.get(ENV_MATERIAL_DIR)
    if env_dir:
        yield os.path.join(env_dir, fname)
    yield _packaged_material_dir().joinpath(fname)


@functools.lru_cache(maxsize=None)
def _load_material_cached(name: str, directory, env_dir):
    # env_dir participates in the key so cache entries don't leak across
    # environment changes (tests monkeypatch the variable).
    for candidate in _search_paths(name, directory):
        if isinstance(candidate, str):
            if not os.path.exists(candidate):
                continue
            with open(candidate, "r", encoding="utf-8") as fh:
                return _parse_material_text(fh.read(), candidate)
        else:
            if not candidate.is_file():
                continue
            return _parse_material_text(candidate.read_text(encoding="utf-8"),
                                        str(candidate))
    raise FileNotFoundError(
        f"no material file {name!r}.txt found (searched explicit directory, "
        f"${ENV_MATERIAL_DIR}, and packaged data)"
    )


def load_material(name: str, directory=None) -> MaterialModel:
    """Load a material by name.

    Search order: ``directory`` argument, the ``MICROSPDC_MATERIALS``
    environment variable, then the packaged data files.
    """
    return _load_material_cached(name, directory, os.environ.get(ENV_MATERIAL_DIR))


def available_materials(directory=None):
    """Names of materials resolvable by :func:`load_material`."""
    names = set()
    dirs = []
    if directory is not None:
        dirs.append(directory)
    env_dir = os.environ.get(ENV_MATERIAL_DIR)
    if env_dir:
        dirs.append(env_dir)
    for d in dirs:
        if os.path.isdir(d):
            names.update(f[:-4] for f in os.listdir(d) if f.endswith(".txt"))
    for entry in _packaged_material_dir().iterdir():
        if entry.name.endswith(".txt"):
            names.add(entry.name[:-4])
    return sorted(names)
