"""Trial-by-trial stochastic simulation of the full memory experiment.

Each trial draws a Poisson photon number for the input coherent state and
pushes it through write conversion, per-round-trip cavity survival with
leakage detection, read conversion at the configured round trip, and the
detection chain.  Photons never interfere between round trips (all
reported observables are count rates), so the per-photon Bernoulli chain
is evaluated as a cascade of binomial thinnings, vectorized over trials.

Determinism: trials are partitioned into fixed-size chunks, each driven by
a counter-based (Philox) stream spawned from the scenario seed, so the
result is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bsfwm import (
    FAST,
    SLOW,
    BsfwmCoupling,
    ControlPair,
    conversion_angle,
    delay_profile,
)
from .cavity import (
    FiberCavity,
    reflectivity_from_lifetime,
    round_trip_time_ns,
    survival_for_lifetime,
    survival_per_round_trip,
)
from .detection import DetectionChain, NoiseModel, detection_efficiency, noise_mean
from .errors import ConfigError, DomainError
from .spectral import translate_frequency

CHUNK_TRIALS = 1 << 15  # fixed so chunk boundaries never depend on worker count


@dataclass(frozen=True)
class TimeTagHistogram:
    """Detection counts binned by cavity round-trip index, one polarization axis."""

    axis: str
    counts: tuple
    n_trials: int

    def __post_init__(self):
        if self.axis not in (FAST, SLOW):
            raise DomainError(f"axis must be 'fast' or 'slow', got {self.axis!r}")
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or c.size < 1:
            raise DomainError("counts must be a non-empty 1-d sequence")
        if np.any(c < 0):
            raise DomainError("counts must be >= 0")
        if self.n_trials < 1:
            raise DomainError("n_trials must be >= 1")
        object.__setattr__(self, "counts", tuple(int(x) for x in c))

    def counts_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    def rate(self, bin_index: int) -> float:
        """Counts per trial in one bin."""
        return self.counts[bin_index] / self.n_trials


@dataclass(frozen=True)
class ExperimentScenario:
    """Full configuration of one simulated memory run."""

    cavity: FiberCavity
    coupling_write: BsfwmCoupling
    coupling_read: BsfwmCoupling
    write_pair: ControlPair
    read_pair: ControlPair
    noise: NoiseModel
    chain: DetectionChain
    input_mean_photons: float = 1.0
    signal_wavelength_nm: float = 902.5
    read_delay_ns: float = 12.67
    n_trials: int = 100_000
    rng_seed: int = 0
    n_bins: int = 8
    # Effective storage lifetime (round trips) during memory operation; when
    # set it overrides the coating-derived survival (the in-operation facet
    # reflectivity differs from the cold-cavity one).
    storage_lifetime_round_trips: float | None = 16.0
    # Residual loss on the retrieved photon not captured by the efficiency
    # chain (mode mismatch etc.); a calibration constant, not physics.
    readout_loss: float = 0.9402
    audit: bool = False

    def __post_init__(self):
        if self.n_trials < 1 or self.n_bins < 1:
            raise DomainError("n_trials and n_bins must be >= 1")
        if self.input_mean_photons < 0:
            raise DomainError("input mean photons must be >= 0")
        if self.read_delay_ns < 0:
            raise DomainError("read delay must be >= 0")
        if not 0.0 <= self.readout_loss <= 1.0:
            raise DomainError("readout_loss must be in [0, 1]")

    @property
    def storage_wavelength_nm(self) -> float:
        return translate_frequency(
            self.signal_wavelength_nm,
            self.write_pair.q_wavelength_nm,
            self.write_pair.p_wavelength_nm,
            "downshift",
        )

    def read_bin(self) -> int:
        return int(round(self.read_delay_ns / round_trip_time_ns(self.cavity)))

    def without_controls(self) -> "ExperimentScenario":
        return replace(
            self,
            write_pair=replace(self.write_pair, q_energy_nj=0.0, p_energy_nj=0.0),
            read_pair=replace(self.read_pair, q_energy_nj=0.0, p_energy_nj=0.0),
        )

    def write_only(self) -> "ExperimentScenario":
        return replace(
            self, read_pair=replace(self.read_pair, q_energy_nj=0.0, p_energy_nj=0.0)
        )

    def with_input(self, mean_photons: float) -> "ExperimentScenario":
        return replace(self, input_mean_photons=mean_photons)


@dataclass(frozen=True)
class _ChainParams:
    """Scalar probabilities precomputed once per run."""

    n_input: float
    eta_write: float
    eta_read: float
    survival: float
    leak_fraction: float  # P(lost photon leaks out the detectable facet)
    detect_pass: float  # unconverted signal exiting at bin 0
    detect_read: float  # retrieved signal at the read bin
    detect_leak: float  # cavity leakage on the slow axis
    write_noise_det: float  # detected noise counts/trial at bin 0
    read_noise_det: float  # detected noise counts/trial at the read bin
    dark_per_bin: float
    t_read: int
    n_bins: int
    write_on: bool
    read_on: bool


def _chain_params(s: ExperimentScenario) -> _ChainParams:
    t_read = s.read_bin()
    if s.read_pair.is_on and t_read >= s.n_bins:
        raise ConfigError(
            f"read bin {t_read} falls outside the {s.n_bins}-bin histogram"
        )
    lam_r = s.storage_wavelength_nm
    if s.storage_lifetime_round_trips is not None:
        p = survival_for_lifetime(s.storage_lifetime_round_trips)
        r_eff = reflectivity_from_lifetime(s.storage_lifetime_round_trips, s.cavity)
    else:
        p = survival_per_round_trip(s.cavity, lam_r)
        r_eff = s.cavity.reflectivity_at(lam_r)
    f_pass = s.cavity.single_pass_survival()
    leak_fraction = f_pass * (1.0 - r_eff) / (1.0 - p) if p < 1.0 else 0.0

    kappa_w = delay_profile(s.coupling_write, s.write_pair.delay_ps)
    kappa_r = delay_profile(s.coupling_read, s.read_pair.delay_ps)
    eta_w = math.sin(conversion_angle(s.coupling_write, s.write_pair) * kappa_w) ** 2
    eta_r = math.sin(conversion_angle(s.coupling_read, s.read_pair) * kappa_r) ** 2

    eta_det = detection_efficiency(s.chain)
    collect = s.chain.collection_efficiency * s.chain.spcm_efficiency
    trt_s = round_trip_time_ns(s.cavity) * 1e-9
    write_noise = (
        s.noise.raman_coefficient * s.write_pair.total_energy_nj * eta_det
        if s.write_pair.is_on
        else 0.0
    )
    read_noise = (
        noise_mean(s.noise, s.write_pair, s.read_pair, kappa_r) * eta_det
        if s.read_pair.is_on
        else 0.0
    )
    return _ChainParams(
        n_input=s.input_mean_photons,
        eta_write=eta_w if s.write_pair.is_on else 0.0,
        eta_read=eta_r if s.read_pair.is_on else 0.0,
        survival=p,
        leak_fraction=leak_fraction,
        detect_pass=eta_det,
        detect_read=s.readout_loss * eta_det,
        detect_leak=collect,
        write_noise_det=write_noise,
        read_noise_det=read_noise,
        dark_per_bin=s.noise.dark_rate_per_s * trt_s,
        t_read=t_read,
        n_bins=s.n_bins,
        write_on=s.write_pair.is_on,
        read_on=s.read_pair.is_on,
    )


_AUDIT_KEYS = (
    "generated",
    "detected",
    "lost_exit_undetected",
    "lost_read_undetected",
    "lost_cavity",
    "lost_leak_undetected",
    "remaining",
    "noise_detected",
)


def _run_chunk(seedseq, n: int, pp: _ChainParams):
    rng = np.random.Generator(np.random.Philox(seedseq))
    fast = np.zeros(pp.n_bins, dtype=np.int64)
    slow = np.zeros(pp.n_bins, dtype=np.int64)
    audit = dict.fromkeys(_AUDIT_KEYS, 0)

    n_in = rng.poisson(pp.n_input, n)
    n_conv = rng.binomial(n_in, pp.eta_write)
    n_pass = n_in - n_conv
    det_pass = int(rng.binomial(n_pass, pp.detect_pass).sum())
    fast[0] += det_pass
    audit["generated"] += int(n_in.sum())
    audit["detected"] += det_pass
    audit["lost_exit_undetected"] += int(n_pass.sum()) - det_pass
    if pp.write_noise_det > 0:
        nz = int(rng.poisson(pp.write_noise_det * n))
        fast[0] += nz
        audit["noise_detected"] += nz

    alive = n_conv
    for t in range(pp.n_bins):
        if pp.read_on and t == pp.t_read:
            n_read = rng.binomial(alive, pp.eta_read)
            alive = alive - n_read
            det_read = int(rng.binomial(n_read, pp.detect_read).sum())
            fast[t] += det_read
            audit["detected"] += det_read
            audit["lost_read_undetected"] += int(n_read.sum()) - det_read
            if pp.read_noise_det > 0:
                nz = int(rng.poisson(pp.read_noise_det * n))
                fast[t] += nz
                audit["noise_detected"] += nz
        survivors = rng.binomial(alive, pp.survival)
        dead = alive - survivors
        leaked = rng.binomial(dead, pp.leak_fraction)
        det_leak = int(rng.binomial(leaked, pp.detect_leak).sum())
        slow[t] += det_leak
        audit["detected"] += det_leak
        audit["lost_leak_undetected"] += int(leaked.sum()) - det_leak
        audit["lost_cavity"] += int(dead.sum()) - int(leaked.sum())
        alive = survivors
        if pp.dark_per_bin > 0:
            for hist in (fast, slow):
                nz = int(rng.poisson(pp.dark_per_bin * n))
                hist[t] += nz
                audit["noise_detected"] += nz
    audit["remaining"] += int(alive.sum())
    return fast, slow, audit


@dataclass(frozen=True)
class MonteCarloResult:
    fast: TimeTagHistogram
    slow: TimeTagHistogram
    audit: dict | None = None


def run_scenario(scenario: ExperimentScenario, workers: int = 1) -> MonteCarloResult:
    """Simulate the scenario; bit-identical output for any worker count."""
    pp = _chain_params(scenario)
    n_chunks = -(-scenario.n_trials // CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * (n_chunks - 1)
    sizes.append(scenario.n_trials - CHUNK_TRIALS * (n_chunks - 1))
    children = np.random.SeedSequence(scenario.rng_seed).spawn(n_chunks)

    if workers <= 1 or n_chunks == 1:
        parts = [_run_chunk(ss, n, pp) for ss, n in zip(children, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, children, sizes, [pp] * n_chunks))

    fast = np.zeros(pp.n_bins, dtype=np.int64)
    slow = np.zeros(pp.n_bins, dtype=np.int64)
    audit = dict.fromkeys(_AUDIT_KEYS, 0)
    for f, sl, a in parts:
        fast += f
        slow += sl
        for k in _AUDIT_KEYS:
            audit[k] += a[k]
    return MonteCarloResult(
        fast=TimeTagHistogram(FAST, tuple(fast), scenario.n_trials),
        slow=TimeTagHistogram(SLOW, tuple(slow), scenario.n_trials),
        audit=audit if scenario.audit else None,
    )


def standard_runs(scenario: ExperimentScenario, workers: int = 1) -> dict:
    """The four canonical runs: controls off, write only, all controls, and
    all controls with the input blocked (noise reference).

    Each run gets its own seed offset so the four estimates are
    statistically independent while staying reproducible.
    """
    return {
        "all": run_scenario(scenario, workers),
        "off": run_scenario(replace(scenario.without_controls(), rng_seed=scenario.rng_seed + 1), workers),
        "write": run_scenario(replace(scenario.write_only(), rng_seed=scenario.rng_seed + 2), workers),
        "noise": run_scenario(replace(scenario.with_input(0.0), rng_seed=scenario.rng_seed + 3), workers),
    }


def delay_scan(scenario: ExperimentScenario, delays_ps, stage: str, workers: int = 1):
    """Scan a stage delay; returns rows (delay_ps, signal, noise, corrected).

    Rates are detected counts per trial in the read bin on the fast axis;
    the noise rate comes from a companion run with the input blocked.
    """
    if stage not in ("signal_vs_write", "read_vs_write"):
        raise DomainError(f"unknown scan stage {stage!r}")
    rows = []
    t_read = scenario.read_bin()
    for d in delays_ps:
        if not math.isfinite(d):
            raise DomainError(f"delay must be finite, got {d}")
        if stage == "signal_vs_write":
            scn = replace(scenario, write_pair=replace(scenario.write_pair, delay_ps=float(d)))
        else:
            scn = replace(scenario, read_pair=replace(scenario.read_pair, delay_ps=float(d)))
        sig = run_scenario(scn, workers).fast.rate(t_read)
        noi = run_scenario(scn.with_input(0.0), workers).fast.rate(t_read)
        rows.append((float(d), sig, noi, sig - noi))
    return rows


def power_scan(scenario: ExperimentScenario, energies_nj, workers: int = 1):
    """Write-only control-energy scan; rows (sqrt(WqWp), signal, noise, corrected).

    The signal rate is the transmitted (unconverted) input at bin 0 on the
    fast axis, which follows cos^2 of the conversion angle.
    """
    rows = []
    base = scenario.write_only()
    for e in energies_nj:
        if e < 0:
            raise DomainError(f"control energy must be >= 0, got {e}")
        scn = replace(
            base,
            write_pair=replace(base.write_pair, q_energy_nj=float(e), p_energy_nj=float(e)),
        )
        sig = run_scenario(scn, workers).fast.rate(0)
        noi = run_scenario(scn.with_input(0.0), workers).fast.rate(0)
        rows.append((float(e), sig, noi, sig - noi))
    return rows
