"""Detection-efficiency chain and phenomenological Raman noise model.

Noise from the control pulses is spontaneous Raman scattering, linear in
control energy.  The read controls produce noise directly in the signal
window; write-generated noise photons stored in the cavity are translated
out by the read stage, scaled by the same delay profile as the signal.
The write/read split is a calibration convention: only the total level
and its linearity are constrained by measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bsfwm import ControlPair
from .errors import DomainError


@dataclass(frozen=True)
class DetectionChain:
    """Exit-facet transmission, collection efficiency, and detector QE."""

    facet_transmission: float  # T_s at the output signal wavelength
    collection_efficiency: float
    spcm_efficiency: float

    def __post_init__(self):
        for name in ("facet_transmission", "collection_efficiency", "spcm_efficiency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must be in [0, 1], got {v}")


def detection_efficiency(chain: DetectionChain) -> float:
    """Total detection probability for a photon exiting the fiber."""
    return chain.facet_transmission * chain.collection_efficiency * chain.spcm_efficiency


@dataclass(frozen=True)
class NoiseModel:
    """Linear Raman-noise coefficients, all in photons/pulse units."""

    raman_coefficient: float  # photons/pulse per nJ of control energy
    stored_noise_readout_fraction: float  # write noise surviving to the read bin
    dark_rate_per_s: float = 0.0

    def __post_init__(self):
        if self.raman_coefficient < 0 or self.stored_noise_readout_fraction < 0:
            raise DomainError("noise coefficients must be >= 0")
        if self.dark_rate_per_s < 0:
            raise DomainError("dark rate must be >= 0")


def calibrate_noise_model(
    target_photons_per_pulse: float,
    write_pair: ControlPair,
    read_pair: ControlPair,
    stored_noise_readout_fraction: float,
    dark_rate_per_s: float = 0.0,
) -> NoiseModel:
    """Choose the Raman coefficient so the read-bin noise hits a target level."""
    denom = read_pair.total_energy_nj + stored_noise_readout_fraction * write_pair.total_energy_nj
    if denom <= 0:
        raise DomainError("cannot calibrate noise with zero control energy")
    a = target_photons_per_pulse / denom
    return NoiseModel(a, stored_noise_readout_fraction, dark_rate_per_s)


def noise_mean(
    model: NoiseModel,
    write_pair: ControlPair,
    read_pair: ControlPair,
    read_delay_kappa: float,
    gate_s: float = 0.0,
) -> float:
    """Mean noise photons/pulse in the signal window at the readout bin.

    Direct Raman noise from the read controls plus write-generated noise
    stored in the cavity and translated out by the read stage (scaled by
    the read delay profile kappa), plus dark counts over the gate.
    """
    if not 0.0 <= read_delay_kappa <= 1.0:
        raise DomainError(f"kappa must be in [0, 1], got {read_delay_kappa}")
    a = model.raman_coefficient
    direct = a * read_pair.total_energy_nj
    stored = model.stored_noise_readout_fraction * read_delay_kappa * a * write_pair.total_energy_nj
    return direct + stored + model.dark_rate_per_s * gate_s


def snr(signal_mean: float, noise_mean_value: float) -> float:
    """Signal-to-noise ratio; returns inf for zero noise."""
    if signal_mean < 0 or noise_mean_value < 0:
        raise DomainError("means must be >= 0")
    if noise_mean_value == 0:
        return math.inf
    return signal_mean / noise_mean_value


def mu1_benchmark(noise_mean_value: float, efficiency: float) -> float:
    """Noise photons per pulse referred to the memory input: N_noise / eta."""
    if efficiency <= 0:
        raise DomainError(f"efficiency must be positive, got {efficiency}")
    if noise_mean_value < 0:
        raise DomainError("noise mean must be >= 0")
    return noise_mean_value / efficiency
