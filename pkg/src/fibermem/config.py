"""Experiment configuration: defaults, strict JSON loading, object building.

One JSON document with sections mirroring the simulation objects; unknown
keys are rejected and every physical invariant is checked at load time.
All quantities carry their unit in the key name.
"""

from __future__ import annotations

import json
import math
from importlib import resources

from .bsfwm import BsfwmCoupling, ControlPair, xi_for_efficiency
from .cavity import FiberCavity, survival_for_lifetime
from .detection import DetectionChain, NoiseModel, calibrate_noise_model
from .errors import ConfigError, FibermemError
from .montecarlo import ExperimentScenario
from .multiplex import MultiplexConfig
from .spectral import CoatingCurve

# Default operating point the shipped configuration is calibrated to:
# write/read conversion efficiencies, total memory efficiency, read-bin
# noise level, and the effective storage lifetime during memory operation.
DEFAULT_WRITE_EFFICIENCY = 0.95
DEFAULT_READ_EFFICIENCY = 0.87
DEFAULT_TOTAL_EFFICIENCY = 0.73
DEFAULT_NOISE_PHOTONS_PER_PULSE = 0.30
DEFAULT_STORAGE_LIFETIME_RT = 16.0
DEFAULT_CONTROL_ENERGY_NJ = 2.2

_P_STORE = survival_for_lifetime(DEFAULT_STORAGE_LIFETIME_RT)
# Residual retrieval loss reconciling the naive product eta_w * p * eta_r
# with the calibrated total efficiency; a lumped constant, not physics.
DEFAULT_READOUT_LOSS = DEFAULT_TOTAL_EFFICIENCY / (
    DEFAULT_WRITE_EFFICIENCY * _P_STORE * DEFAULT_READ_EFFICIENCY
)
_XI_WRITE = xi_for_efficiency(
    DEFAULT_WRITE_EFFICIENCY, DEFAULT_CONTROL_ENERGY_NJ, DEFAULT_CONTROL_ENERGY_NJ
)
_XI_READ = xi_for_efficiency(
    DEFAULT_READ_EFFICIENCY, DEFAULT_CONTROL_ENERGY_NJ, DEFAULT_CONTROL_ENERGY_NJ
)
# Write-generated noise stored one round trip then translated out by the read.
_STORED_NOISE_FRACTION = DEFAULT_READ_EFFICIENCY * _P_STORE
_RAMAN_COEFF = DEFAULT_NOISE_PHOTONS_PER_PULSE / (
    2 * DEFAULT_CONTROL_ENERGY_NJ * (1.0 + _STORED_NOISE_FRACTION)
)

DEFAULTS: dict = {
    "cavity": {
        "length_m": 1.285,
        "group_index": 1.478,
        "fiber_loss_db_per_km": 5.0,
        "extra_loss_db_per_round_trip": 0.0,
        "coating_csv": None,  # null -> bundled synthetic curve
        "facet_reflectivity": None,  # scalar override, wins over the curve
        "lambda0_nm": 915.0,
    },
    "signal": {
        "wavelength_nm": 902.5,
        "bandwidth_fwhm_nm": 1.05,
        "duration_ps": 1.1,
    },
    "write": {
        "q_energy_nj": DEFAULT_CONTROL_ENERGY_NJ,
        "p_energy_nj": DEFAULT_CONTROL_ENERGY_NJ,
        "q_wavelength_nm": 790.1,
        "p_wavelength_nm": 807.4,
        "delay_ps": 0.0,
        "xi_rad_per_nj": _XI_WRITE,
        "walkoff_ps": 16.6,
        "control_duration_ps": 2.3,
    },
    "read": {
        "q_energy_nj": DEFAULT_CONTROL_ENERGY_NJ,
        "p_energy_nj": DEFAULT_CONTROL_ENERGY_NJ,
        "q_wavelength_nm": 790.1,
        "p_wavelength_nm": 807.4,
        "delay_ps": 0.0,
        "xi_rad_per_nj": _XI_READ,
        "walkoff_ps": 16.6,
        "control_duration_ps": 2.3,
    },
    "noise": {
        "raman_coefficient_per_nj": _RAMAN_COEFF,
        "stored_noise_readout_fraction": _STORED_NOISE_FRACTION,
        "dark_rate_per_s": 0.0,
    },
    "detection": {
        "facet_transmission": 0.74,
        "collection_efficiency": 0.65,
        "spcm_efficiency": 0.44,
    },
    "scenario": {
        "input_mean_photons": 1.0,
        "read_delay_ns": 12.67,
        "n_trials": 100_000,
        "rng_seed": 1234,
        "n_bins": 8,
        "storage_lifetime_round_trips": DEFAULT_STORAGE_LIFETIME_RT,
        "readout_loss": DEFAULT_READOUT_LOSS,
    },
    "multiplex": {
        "herald_probability": 0.05,
        "n_bins": 10,
        "memory_total_efficiency": DEFAULT_TOTAL_EFFICIENCY,
        "survival_per_round_trip": _P_STORE,
        "source_heralding_efficiency": 1.0,
    },
}


def default_coating_curve(lambda0_nm: float = 915.0) -> CoatingCurve:
    """Bundled synthetic dichroic curve: transmissive below the edge,
    reflective above, with the tail shaped to match measured lifetimes."""
    ref = resources.files("fibermem.data") / "coating_default.csv"
    with resources.as_file(ref) as path:
        return CoatingCurve.from_csv(path, lambda0_nm)


class Config:
    """Validated configuration document."""

    def __init__(self, data: dict | None = None):
        merged = {k: dict(v) for k, v in DEFAULTS.items()}
        if data is not None:
            if not isinstance(data, dict):
                raise ConfigError("config root must be a JSON object")
            for section, values in data.items():
                if section not in merged:
                    raise ConfigError(
                        f"unknown config section {section!r}; "
                        f"expected one of {sorted(merged)}"
                    )
                if not isinstance(values, dict):
                    raise ConfigError(f"section {section!r} must be an object")
                for key, value in values.items():
                    if key not in merged[section]:
                        raise ConfigError(
                            f"unknown key {section}.{key}; "
                            f"expected one of {sorted(merged[section])}"
                        )
                    merged[section][key] = value
        self._data = merged
        try:
            self.build_scenario()
            self.build_multiplex()
        except FibermemError as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def load(cls, path) -> "Config":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls(data)

    def to_dict(self) -> dict:
        return {k: dict(v) for k, v in self._data.items()}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __getitem__(self, section: str) -> dict:
        return self._data[section]

    def override(self, section: str, key: str, value) -> "Config":
        data = self.to_dict()
        data[section][key] = value
        return Config(data)

    def coating_curve(self) -> CoatingCurve | None:
        cav = self._data["cavity"]
        if cav["coating_csv"] is not None:
            return CoatingCurve.from_csv(cav["coating_csv"], cav["lambda0_nm"])
        if cav["facet_reflectivity"] is not None:
            return None
        return default_coating_curve(cav["lambda0_nm"])

    def build_cavity(self) -> FiberCavity:
        cav = self._data["cavity"]
        reflectivity = cav["facet_reflectivity"]
        if reflectivity is None:
            reflectivity = self.coating_curve()
        return FiberCavity(
            length_m=cav["length_m"],
            group_index=cav["group_index"],
            fiber_loss_db_per_km=cav["fiber_loss_db_per_km"],
            facet_reflectivity=reflectivity,
            extra_loss_db_per_round_trip=cav["extra_loss_db_per_round_trip"],
        )

    def _pair(self, role: str) -> ControlPair:
        sec = self._data[role]
        return ControlPair(
            q_energy_nj=sec["q_energy_nj"],
            p_energy_nj=sec["p_energy_nj"],
            q_wavelength_nm=sec["q_wavelength_nm"],
            p_wavelength_nm=sec["p_wavelength_nm"],
            delay_ps=sec["delay_ps"],
            role=role,
        )

    def _coupling(self, role: str) -> BsfwmCoupling:
        sec = self._data[role]
        return BsfwmCoupling(
            xi_rad_per_nj=sec["xi_rad_per_nj"],
            walkoff_ps=sec["walkoff_ps"],
            signal_duration_ps=self._data["signal"]["duration_ps"],
            control_duration_ps=sec["control_duration_ps"],
        )

    def build_detection(self) -> DetectionChain:
        det = self._data["detection"]
        return DetectionChain(
            facet_transmission=det["facet_transmission"],
            collection_efficiency=det["collection_efficiency"],
            spcm_efficiency=det["spcm_efficiency"],
        )

    def build_noise(self) -> NoiseModel:
        noi = self._data["noise"]
        return NoiseModel(
            raman_coefficient=noi["raman_coefficient_per_nj"],
            stored_noise_readout_fraction=noi["stored_noise_readout_fraction"],
            dark_rate_per_s=noi["dark_rate_per_s"],
        )

    def build_scenario(self) -> ExperimentScenario:
        scn = self._data["scenario"]
        return ExperimentScenario(
            cavity=self.build_cavity(),
            coupling_write=self._coupling("write"),
            coupling_read=self._coupling("read"),
            write_pair=self._pair("write"),
            read_pair=self._pair("read"),
            noise=self.build_noise(),
            chain=self.build_detection(),
            input_mean_photons=scn["input_mean_photons"],
            signal_wavelength_nm=self._data["signal"]["wavelength_nm"],
            read_delay_ns=scn["read_delay_ns"],
            n_trials=int(scn["n_trials"]),
            rng_seed=int(scn["rng_seed"]),
            n_bins=int(scn["n_bins"]),
            storage_lifetime_round_trips=scn["storage_lifetime_round_trips"],
            readout_loss=scn["readout_loss"],
        )

    def build_multiplex(self) -> MultiplexConfig:
        mpx = self._data["multiplex"]
        return MultiplexConfig(
            herald_probability=mpx["herald_probability"],
            n_bins=int(mpx["n_bins"]),
            memory_total_efficiency=mpx["memory_total_efficiency"],
            survival_per_round_trip=mpx["survival_per_round_trip"],
            source_heralding_efficiency=mpx["source_heralding_efficiency"],
        )
