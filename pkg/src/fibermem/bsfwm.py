"""Bragg-scattering four-wave-mixing interaction model.

The two control pulses act as a frequency-domain beam splitter on the
signal: the converted fraction is sin^2 of an angle proportional to the
geometric mean of the control pulse energies.  Group-velocity walk-off
between signal and controls sets the temporal window of the interaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import DomainError
from .spectral import FWHM_TO_SIGMA, translate_frequency

FAST = "fast"
SLOW = "slow"


def other_axis(axis: str) -> str:
    if axis == FAST:
        return SLOW
    if axis == SLOW:
        return FAST
    raise DomainError(f"unknown polarization axis {axis!r}")


@dataclass(frozen=True)
class ControlPair:
    """One write or read pair of control pulses (in-fiber energies)."""

    q_energy_nj: float
    p_energy_nj: float
    q_wavelength_nm: float = 790.1
    p_wavelength_nm: float = 807.4
    delay_ps: float = 0.0  # relative to the circulating signal; 0 = optimal
    role: str = "write"

    def __post_init__(self):
        if self.q_energy_nj < 0 or self.p_energy_nj < 0:
            raise DomainError("control energies must be >= 0")
        if self.q_wavelength_nm <= 0 or self.p_wavelength_nm <= 0:
            raise DomainError("control wavelengths must be positive")
        if self.role not in ("write", "read"):
            raise DomainError(f"role must be 'write' or 'read', got {self.role!r}")

    @property
    def is_on(self) -> bool:
        return self.q_energy_nj > 0 and self.p_energy_nj > 0

    @property
    def total_energy_nj(self) -> float:
        return self.q_energy_nj + self.p_energy_nj


@dataclass(frozen=True)
class BsfwmCoupling:
    """Interaction constants for one conversion stage."""

    xi_rad_per_nj: float  # conversion-angle slope vs sqrt(Wq*Wp)
    walkoff_ps: float  # total signal-control group-delay slip over the fiber
    signal_duration_ps: float
    control_duration_ps: float

    def __post_init__(self):
        if self.xi_rad_per_nj < 0:
            raise DomainError("xi must be >= 0")
        if self.walkoff_ps <= 0:
            raise DomainError("walk-off must be positive")
        if self.signal_duration_ps <= 0 or self.control_duration_ps <= 0:
            raise DomainError("pulse durations must be positive")


def xi_for_efficiency(efficiency: float, q_energy_nj: float, p_energy_nj: float) -> float:
    """Coupling constant that yields the target conversion efficiency at full collision."""
    if not 0.0 <= efficiency <= 1.0:
        raise DomainError("efficiency must be in [0, 1]")
    w = math.sqrt(q_energy_nj * p_energy_nj)
    if w <= 0:
        raise DomainError("control energies must be positive to calibrate xi")
    return math.asin(math.sqrt(efficiency)) / w


def conversion_angle(coupling: BsfwmCoupling, pair: ControlPair) -> float:
    """Beam-splitter angle xi*sqrt(Wq*Wp) at full collision."""
    return coupling.xi_rad_per_nj * math.sqrt(pair.q_energy_nj * pair.p_energy_nj)


def translation_efficiency(theta_rad: float) -> float:
    """Converted fraction sin^2(theta); the unconverted fraction is cos^2(theta)."""
    if theta_rad < 0:
        raise DomainError(f"conversion angle must be >= 0, got {theta_rad}")
    return math.sin(theta_rad) ** 2


def delay_profile(coupling: BsfwmCoupling, delay_ps):
    """Fraction of the maximum conversion angle achieved at a signal-control delay.

    The signal slips past the control-pulse grating by the walk-off over the
    fiber length, so the accumulated interaction is the control intensity
    envelope cross-correlated with a boxcar of width walkoff_ps, convolved
    with the signal envelope.  For Gaussian envelopes this collapses to a
    difference of error functions; the result is normalized to 1 at zero
    (optimal) delay.  Accepts scalars or arrays.
    """
    sigma_c = coupling.control_duration_ps * FWHM_TO_SIGMA
    sigma_s = coupling.signal_duration_ps * FWHM_TO_SIGMA
    sigma = math.sqrt(sigma_c**2 + sigma_s**2)
    half = coupling.walkoff_ps / 2.0
    tau = np.asarray(delay_ps, dtype=float)
    raw = 0.5 * (erf((tau + half) / (math.sqrt(2) * sigma)) - erf((tau - half) / (math.sqrt(2) * sigma)))
    peak = erf(half / (math.sqrt(2) * sigma))
    kappa = np.clip(raw / peak, 0.0, 1.0)
    return float(kappa) if np.ndim(delay_ps) == 0 else kappa


def effective_angle(coupling: BsfwmCoupling, pair: ControlPair) -> float:
    """Conversion angle reduced by the delay profile at the pair's delay."""
    return conversion_angle(coupling, pair) * delay_profile(coupling, pair.delay_ps)


def conversion_probability(coupling: BsfwmCoupling, pair: ControlPair) -> float:
    return translation_efficiency(effective_angle(coupling, pair))


def apply_bsfwm(
    photon_state: tuple,
    pair: ControlPair,
    coupling: BsfwmCoupling,
    rng_draw: float,
    resonant_input_nm: float,
) -> tuple:
    """Stochastically frequency-translate and axis-toggle one photon.

    The pair only acts on photons at its resonant input wavelength on the
    expected axis (fast for write, slow for read); everything else passes
    through unchanged.  Photon number is conserved: the state is relabeled,
    never created or destroyed.
    """
    wavelength_nm, axis = photon_state
    expected_axis = FAST if pair.role == "write" else SLOW
    if axis != expected_axis:
        return photon_state
    if not math.isclose(wavelength_nm, resonant_input_nm, rel_tol=1e-6):
        return photon_state
    prob = conversion_probability(coupling, pair)
    if rng_draw >= prob:
        return photon_state
    direction = "downshift" if pair.role == "write" else "upshift"
    out_nm = translate_frequency(wavelength_nm, pair.q_wavelength_nm, pair.p_wavelength_nm, direction)
    return (out_nm, other_axis(axis))
