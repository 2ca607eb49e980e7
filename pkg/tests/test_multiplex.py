import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fibermem.errors import DomainError
from fibermem.multiplex import (
    MultiplexConfig,
    optimal_bin_count,
    output_photon_probability,
)


def cfg(p_h=0.05, n=10, eta=0.73, p=None, src=1.0):
    if p is None:
        p = math.exp(-1 / 39.7)
    return MultiplexConfig(p_h, n, eta, p, src)


def brute_force_sum(c: MultiplexConfig) -> float:
    """Exact-rational oracle for the first-herald sum."""
    p_h = Fraction(c.herald_probability).limit_denominator(10**12)
    eta = Fraction(c.memory_total_efficiency).limit_denominator(10**12)
    p = Fraction(c.survival_per_round_trip).limit_denominator(10**12)
    src = Fraction(c.source_heralding_efficiency).limit_denominator(10**12)
    total = Fraction(0)
    for k in range(1, c.n_bins + 1):
        total += (1 - p_h) ** (k - 1) * p_h * src * eta * p ** (c.n_bins - k)
    return float(total)


class TestOutputProbability:
    def test_single_bin_is_source_only(self):
        c = cfg(n=1, p_h=0.2, eta=0.5, src=0.9)
        assert output_photon_probability(c) == pytest.approx(0.2 * 0.9 * 0.5, rel=1e-15)

    def test_lossless_memory_geometric_series(self):
        c = cfg(p_h=0.1, n=12, eta=1.0, p=1.0, src=0.8)
        assert output_photon_probability(c) == pytest.approx(0.8 * (1 - 0.9**12), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 5, 10, 33, 64])
    def test_brute_force_oracle_agreement(self, n):
        c = cfg(n=n)
        assert output_photon_probability(c) == pytest.approx(brute_force_sum(c), rel=1e-12)

    def test_multiplexing_beats_single_bin_at_paper_point(self):
        c = cfg()
        assert output_photon_probability(c) > output_photon_probability(replace(c, n_bins=1))

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.integers(min_value=1, max_value=50),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_probability_bounds(self, p_h, n, eta, p, src):
        v = output_photon_probability(MultiplexConfig(p_h, n, eta, p, src))
        assert 0.0 <= v <= 1.0

    @given(
        st.floats(min_value=0.01, max_value=0.5),
        st.integers(min_value=1, max_value=30),
        st.floats(min_value=0.1, max_value=0.9),
        st.floats(min_value=0.8, max_value=1.0),
    )
    def test_monotone_in_each_parameter(self, p_h, n, eta, p):
        base = output_photon_probability(MultiplexConfig(p_h, n, eta, p))
        assert output_photon_probability(MultiplexConfig(min(p_h * 1.1, 1.0), n, eta, p)) >= base - 1e-15
        assert output_photon_probability(MultiplexConfig(p_h, n, min(eta * 1.1, 1.0), p)) >= base - 1e-15
        assert output_photon_probability(MultiplexConfig(p_h, n, eta, min(p * 1.05, 1.0))) >= base - 1e-15


class TestOptimalBinCount:
    def test_lossless_prefers_max(self):
        assert optimal_bin_count(cfg(eta=1.0, p=1.0), 40) == 40

    def test_dead_cavity_prefers_single_bin(self):
        assert optimal_bin_count(cfg(p=0.0), 20) == 1

    def test_finite_optimum_by_exhaustive_scan(self):
        c = cfg()
        n_max = 400
        best = optimal_bin_count(c, n_max)
        probs = [output_photon_probability(replace(c, n_bins=n)) for n in range(1, n_max + 1)]
        assert best == probs.index(max(probs)) + 1
        assert 1 < best < n_max

    def test_tie_breaks_toward_smaller(self):
        # with p_h = 0 every N gives zero; smallest N must win
        assert optimal_bin_count(cfg(p_h=0.0), 10) == 1

    def test_rejects_bad_nmax(self):
        with pytest.raises(DomainError):
            optimal_bin_count(cfg(), 0)
