"""Wavelength/frequency bookkeeping, coating curves, and spectral profiles.

Wavelengths are vacuum wavelengths in nanometers throughout; angular
frequencies are rad/s.  All objects here are immutable and all functions
are pure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError

C_M_PER_S = 299_792_458.0  # speed of light, exact
C_NM_PER_S = C_M_PER_S * 1e9


def wavelength_to_omega(wavelength_nm: float) -> float:
    """Angular frequency (rad/s) of a vacuum wavelength in nm."""
    if not math.isfinite(wavelength_nm) or wavelength_nm <= 0:
        raise DomainError(f"wavelength must be positive and finite, got {wavelength_nm}")
    return 2.0 * math.pi * C_NM_PER_S / wavelength_nm


def omega_to_wavelength(omega_rad_per_s: float) -> float:
    """Inverse of :func:`wavelength_to_omega`."""
    if not math.isfinite(omega_rad_per_s) or omega_rad_per_s <= 0:
        raise DomainError(f"angular frequency must be positive and finite, got {omega_rad_per_s}")
    return 2.0 * math.pi * C_NM_PER_S / omega_rad_per_s


def translate_frequency(
    signal_nm: float,
    q_nm: float,
    p_nm: float,
    direction: str = "downshift",
) -> float:
    """Four-wave-mixing frequency map between the two signal wavelengths.

    The control pair shifts the signal's frequency by the control frequency
    difference: downshift gives 1/out = 1/signal - (1/q - 1/p); upshift is
    the exact inverse map (used on retrieval).
    """
    for name, lam in (("signal", signal_nm), ("q", q_nm), ("p", p_nm)):
        if not math.isfinite(lam) or lam <= 0:
            raise DomainError(f"{name} wavelength must be positive, got {lam}")
    if direction not in ("downshift", "upshift"):
        raise DomainError(f"direction must be 'downshift' or 'upshift', got {direction!r}")
    shift = 1.0 / q_nm - 1.0 / p_nm
    if direction == "downshift":
        inv_out = 1.0 / signal_nm - shift
    else:
        inv_out = 1.0 / signal_nm + shift
    if inv_out <= 0:
        raise DomainError(
            f"translated inverse wavelength is non-positive ({inv_out:g} 1/nm); "
            "controls shift the signal out of the physical range"
        )
    return 1.0 / inv_out


@dataclass(frozen=True)
class CoatingCurve:
    """Tabulated end-facet transmission vs wavelength with dichroic edge lambda0.

    Reflectivity is 1 - T - A with absorption A defaulting to zero.
    """

    wavelengths_nm: tuple
    transmissions: tuple
    lambda0_nm: float
    absorptions: tuple | None = None

    def __post_init__(self):
        w = np.asarray(self.wavelengths_nm, dtype=float)
        t = np.asarray(self.transmissions, dtype=float)
        if w.size != t.size or w.size < 2:
            raise DomainError("coating curve needs >= 2 matched (wavelength, transmission) samples")
        if not np.all(np.diff(w) > 0):
            raise DomainError("coating wavelengths must be strictly increasing")
        if np.any(t < 0) or np.any(t > 1):
            raise DomainError("coating transmissions must lie in [0, 1]")
        if self.absorptions is not None:
            a = np.asarray(self.absorptions, dtype=float)
            if a.size != w.size:
                raise DomainError("absorption column length mismatch")
            if np.any(a < 0) or np.any(t + a > 1):
                raise DomainError("absorption must satisfy 0 <= A <= 1 - T")
        object.__setattr__(self, "wavelengths_nm", tuple(w))
        object.__setattr__(self, "transmissions", tuple(t))

    def transmission(self, wavelength_nm: float) -> float:
        return coating_transmission(self, wavelength_nm)

    def absorption(self, wavelength_nm: float) -> float:
        if self.absorptions is None:
            return 0.0
        w = np.asarray(self.wavelengths_nm)
        _check_in_range(w, wavelength_nm)
        return float(np.interp(wavelength_nm, w, np.asarray(self.absorptions)))

    def reflectivity(self, wavelength_nm: float) -> float:
        r = 1.0 - self.transmission(wavelength_nm) - self.absorption(wavelength_nm)
        return min(max(r, 0.0), 1.0)

    @classmethod
    def from_csv(cls, path, lambda0_nm: float) -> "CoatingCurve":
        """Load a `wavelength_nm,transmission[,absorption]` CSV file."""
        wl, tr, ab = [], [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header[:2]] != ["wavelength_nm", "transmission"]:
                raise DomainError(f"unexpected coating CSV header {header!r}")
            has_abs = len(header) >= 3 and header[2].strip() == "absorption"
            for row in reader:
                if not row:
                    continue
                wl.append(float(row[0]))
                tr.append(float(row[1]))
                if has_abs:
                    ab.append(float(row[2]))
        return cls(tuple(wl), tuple(tr), lambda0_nm, tuple(ab) if ab else None)


def _check_in_range(grid: np.ndarray, x: float):
    if x < grid[0] or x > grid[-1]:
        raise RangeError(
            f"wavelength {x} nm outside tabulated range [{grid[0]}, {grid[-1]}] nm"
        )


def coating_transmission(curve: CoatingCurve, wavelength_nm: float) -> float:
    """Linearly interpolated facet transmission; no extrapolation."""
    w = np.asarray(curve.wavelengths_nm)
    _check_in_range(w, wavelength_nm)
    t = float(np.interp(wavelength_nm, w, np.asarray(curve.transmissions)))
    return min(max(t, 0.0), 1.0)


FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class SpectralIntensity:
    """Non-negative spectral intensity samples on a strictly increasing grid."""

    grid_nm: tuple
    values: tuple = field(default=())

    def __post_init__(self):
        g = np.asarray(self.grid_nm, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.size < 8:
            raise DomainError("spectral intensity needs at least 8 samples")
        if v.size != g.size:
            raise DomainError("grid/value length mismatch")
        if not np.all(np.diff(g) > 0):
            raise DomainError("spectral grid must be strictly increasing")
        if np.any(v < 0):
            raise DomainError("spectral intensity must be non-negative")
        object.__setattr__(self, "grid_nm", tuple(g))
        object.__setattr__(self, "values", tuple(v))

    def integral(self) -> float:
        return float(np.trapz(np.asarray(self.values), np.asarray(self.grid_nm)))


def gaussian_spectrum(center_nm: float, fwhm_nm: float, grid_nm) -> SpectralIntensity:
    """Unit-area Gaussian spectral intensity with the stated FWHM.

    The grid must span at least +-3 FWHM around the center so the profile
    is fully contained.
    """
    if fwhm_nm <= 0:
        raise DomainError(f"fwhm must be positive, got {fwhm_nm}")
    g = np.asarray(grid_nm, dtype=float)
    if g[0] > center_nm - 3 * fwhm_nm or g[-1] < center_nm + 3 * fwhm_nm:
        raise RangeError(
            f"grid [{g[0]}, {g[-1]}] nm does not span {center_nm} +- 3*{fwhm_nm} nm"
        )
    sigma = fwhm_nm * FWHM_TO_SIGMA
    vals = np.exp(-0.5 * ((g - center_nm) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return SpectralIntensity(tuple(g), tuple(vals))
