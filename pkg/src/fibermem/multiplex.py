"""Temporal-multiplexing arithmetic for a probabilistic heralded source.

The memory stores the first successful herald among N attempts and
releases it at the synchronized output slot, paying the store/retrieve
efficiency once and one round trip of cavity survival per bin waited.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class MultiplexConfig:
    herald_probability: float  # per attempt
    n_bins: int  # attempts per output clock cycle
    memory_total_efficiency: float  # store + retrieve
    survival_per_round_trip: float
    source_heralding_efficiency: float = 1.0

    def __post_init__(self):
        for name in (
            "herald_probability",
            "memory_total_efficiency",
            "survival_per_round_trip",
            "source_heralding_efficiency",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must be in [0, 1], got {v}")
        if self.n_bins < 1:
            raise DomainError("n_bins must be >= 1")


def output_photon_probability(cfg: MultiplexConfig) -> float:
    """Probability of delivering a photon at the synchronized output slot.

    Sums over the first successful herald landing in attempt k: the photon
    is stored for N-k round trips, then retrieved.
    """
    p_h = cfg.herald_probability
    p = cfg.survival_per_round_trip
    total = 0.0
    for k in range(1, cfg.n_bins + 1):
        total += (
            (1.0 - p_h) ** (k - 1)
            * p_h
            * cfg.source_heralding_efficiency
            * cfg.memory_total_efficiency
            * p ** (cfg.n_bins - k)
        )
    return total


def optimal_bin_count(cfg: MultiplexConfig, n_max: int) -> int:
    """Bin count in [1, n_max] maximizing the output probability; ties go low."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    from dataclasses import replace

    best_n, best_p = 1, -1.0
    for n in range(1, n_max + 1):
        pn = output_photon_probability(replace(cfg, n_bins=n))
        if pn > best_p:
            best_n, best_p = n, pn
    return best_n
