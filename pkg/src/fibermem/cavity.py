"""Fiber-cavity geometry and loss model.

A linear fiber cavity with reflective end facets: one round trip is two
fiber passes and one reflection at each facet.  Survival per round trip
combines both channels, and the 1/e lifetime in round-trip units follows
from the geometric decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError
from .spectral import C_M_PER_S, CoatingCurve


@dataclass(frozen=True)
class FiberCavity:
    """End-facet-coated fiber forming a linear cavity."""

    length_m: float
    group_index: float = 1.478
    fiber_loss_db_per_km: float = 5.0
    # scalar reflectivity override, or a CoatingCurve for R(lambda)
    facet_reflectivity: float | CoatingCurve | None = None
    extra_loss_db_per_round_trip: float = 0.0  # splices, bends; folded in as dB

    def __post_init__(self):
        if self.length_m <= 0:
            raise DomainError(f"cavity length must be positive, got {self.length_m}")
        if self.group_index < 1:
            raise DomainError(f"group index must be >= 1, got {self.group_index}")
        if self.fiber_loss_db_per_km < 0:
            raise DomainError("fiber loss must be >= 0")
        if isinstance(self.facet_reflectivity, (int, float)):
            r = float(self.facet_reflectivity)
            if not 0.0 <= r <= 1.0:
                raise DomainError(f"reflectivity must be in [0, 1], got {r}")

    def reflectivity_at(self, wavelength_nm: float | None = None) -> float:
        if isinstance(self.facet_reflectivity, CoatingCurve):
            if wavelength_nm is None:
                raise DomainError("coating-curve cavity needs a wavelength to evaluate R")
            return self.facet_reflectivity.reflectivity(wavelength_nm)
        if self.facet_reflectivity is None:
            return 1.0
        return float(self.facet_reflectivity)

    def single_pass_survival(self) -> float:
        """Power survival of one pass through the fiber (length L)."""
        loss_db = self.length_m * 1e-3 * self.fiber_loss_db_per_km
        return 10.0 ** (-loss_db / 10.0)


def round_trip_time_ns(cavity: FiberCavity) -> float:
    """Round-trip time 2*L*n_g/c in ns (two fiber passes per round trip)."""
    return 2.0 * cavity.length_m * cavity.group_index / C_M_PER_S * 1e9


def survival_per_round_trip(cavity: FiberCavity, wavelength_nm: float | None = None) -> float:
    """Power survival probability per round trip: R(lambda)^2 times two fiber passes."""
    r = cavity.reflectivity_at(wavelength_nm)
    f = cavity.single_pass_survival()
    extra = 10.0 ** (-cavity.extra_loss_db_per_round_trip / 10.0)
    return r * r * f * f * extra


def lifetime_round_trips(p: float) -> float:
    """1/e lifetime in round-trip units for per-round-trip survival p.

    Returns math.inf for a lossless cavity (p = 1).
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"survival probability must be in (0, 1], got {p}")
    if p == 1.0:
        return math.inf
    return -1.0 / math.log(p)


def survival_for_lifetime(tau_c_round_trips: float) -> float:
    """Inverse of :func:`lifetime_round_trips`."""
    if tau_c_round_trips <= 0:
        raise DomainError(f"lifetime must be positive, got {tau_c_round_trips}")
    if math.isinf(tau_c_round_trips):
        return 1.0
    return math.exp(-1.0 / tau_c_round_trips)


def reflectivity_from_lifetime(tau_c_round_trips: float, cavity: FiberCavity) -> float:
    """Facet reflectivity implied by a measured 1/e lifetime.

    Solves p = R^2 * f^2 for R given tau_c; raises InfeasibleError when the
    fiber loss alone cannot support the requested lifetime (implied R > 1).
    """
    p = survival_for_lifetime(tau_c_round_trips)
    f = cavity.single_pass_survival()
    extra = 10.0 ** (-cavity.extra_loss_db_per_round_trip / 10.0)
    fiber_only = f * f * extra
    if p > fiber_only * (1.0 + 1e-12):
        raise InfeasibleError(
            f"lifetime {tau_c_round_trips} round trips needs survival {p:.6f} "
            f"but fiber loss alone caps it at {fiber_only:.6f}"
        )
    return min(math.sqrt(p / fiber_only), 1.0)


@dataclass(frozen=True)
class RingDownModel:
    """Geometric leakage decay of light trapped in the cavity."""

    round_trip_time_ns: float
    survival_per_round_trip: float

    def __post_init__(self):
        if not 0.0 < self.survival_per_round_trip <= 1.0:
            raise DomainError("survival must be in (0, 1]")
        if self.round_trip_time_ns <= 0:
            raise DomainError("round-trip time must be positive")

    @property
    def lifetime_round_trips(self) -> float:
        return lifetime_round_trips(self.survival_per_round_trip)

    @classmethod
    def for_cavity(cls, cavity: FiberCavity, wavelength_nm: float | None = None) -> "RingDownModel":
        return cls(round_trip_time_ns(cavity), survival_per_round_trip(cavity, wavelength_nm))


def ring_down_expected_counts(model: RingDownModel, initial_rate: float, n_bins: int) -> np.ndarray:
    """Expected leakage counts per round-trip bin: initial_rate * p^T."""
    if initial_rate < 0:
        raise DomainError("initial rate must be >= 0")
    if n_bins < 1:
        raise DomainError("need at least one bin")
    t = np.arange(n_bins)
    return initial_rate * model.survival_per_round_trip ** t
