"""Photon-level simulator and analysis toolkit for a fiber-cavity memory
driven by intracavity four-wave-mixing frequency translation."""

from .analysis import (
    EfficiencyReport,
    LifetimeFit,
    extract_efficiencies,
    fit_delay_scan,
    fit_power_scan,
    fit_ring_down,
    spectral_fidelity,
)
from .bsfwm import (
    BsfwmCoupling,
    ControlPair,
    apply_bsfwm,
    conversion_angle,
    delay_profile,
    translation_efficiency,
)
from .cavity import (
    FiberCavity,
    RingDownModel,
    lifetime_round_trips,
    reflectivity_from_lifetime,
    ring_down_expected_counts,
    round_trip_time_ns,
    survival_per_round_trip,
)
from .config import Config
from .detection import (
    DetectionChain,
    NoiseModel,
    detection_efficiency,
    mu1_benchmark,
    noise_mean,
    snr,
)
from .montecarlo import (
    ExperimentScenario,
    MonteCarloResult,
    TimeTagHistogram,
    delay_scan,
    power_scan,
    run_scenario,
    standard_runs,
)
from .multiplex import MultiplexConfig, optimal_bin_count, output_photon_probability
from .spectral import (
    CoatingCurve,
    SpectralIntensity,
    coating_transmission,
    gaussian_spectrum,
    translate_frequency,
    wavelength_to_omega,
)

__version__ = "0.1.0"
