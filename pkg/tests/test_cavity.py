import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fibermem.cavity import (
    FiberCavity,
    RingDownModel,
    lifetime_round_trips,
    reflectivity_from_lifetime,
    ring_down_expected_counts,
    round_trip_time_ns,
    survival_for_lifetime,
    survival_per_round_trip,
)
from fibermem.errors import DomainError, InfeasibleError
from fibermem.spectral import C_M_PER_S

PAPERLIKE = FiberCavity(length_m=1.285, group_index=1.478, fiber_loss_db_per_km=5.0)


class TestRoundTripTime:
    def test_default_geometry(self):
        assert round_trip_time_ns(PAPERLIKE) == pytest.approx(12.67, abs=0.02)

    def test_linearity_in_length(self):
        double = FiberCavity(2 * 1.285, 1.478, 5.0)
        assert round_trip_time_ns(double) == pytest.approx(2 * round_trip_time_ns(PAPERLIKE), rel=1e-12)

    def test_arithmetic_oracle(self):
        cav = FiberCavity(1.0, 1.5, 5.0)
        assert round_trip_time_ns(cav) == pytest.approx(2 * 1.0 * 1.5 / C_M_PER_S * 1e9, rel=1e-12)
        assert round_trip_time_ns(cav) == pytest.approx(10.007, abs=0.001)


class TestSurvival:
    def test_perfect_mirror(self):
        # oracle: 10**(-2 * 0.001285 * 5 / 10)
        expected = 10.0 ** (-2 * 0.001285 * 5.0 / 10.0)
        cav = FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=1.0)
        assert survival_per_round_trip(cav) == pytest.approx(expected, rel=1e-12)
        assert survival_per_round_trip(cav) == pytest.approx(0.997046, abs=1e-6)

    def test_lossless(self):
        cav = FiberCavity(1.285, 1.478, 0.0, facet_reflectivity=1.0)
        assert survival_per_round_trip(cav) == 1.0

    def test_measured_reflectivity_point(self):
        cav = FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=0.98897)
        expected = 0.98897**2 * 10.0 ** (-2 * 0.001285 * 5.0 / 10.0)
        got = survival_per_round_trip(cav)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(0.97513, abs=2e-5)


class TestLifetime:
    def test_loss_limited_bound(self):
        p = survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=1.0))
        assert lifetime_round_trips(p) == pytest.approx(338.0, abs=0.5)

    def test_one_over_e_definition(self):
        assert lifetime_round_trips(math.exp(-1.0)) == pytest.approx(1.0, rel=1e-12)

    def test_consistency_with_measured_lifetime(self):
        assert lifetime_round_trips(math.exp(-1 / 39.7)) == pytest.approx(39.7, rel=1e-12)

    def test_lossless_is_infinite(self):
        assert lifetime_round_trips(1.0) == math.inf

    @pytest.mark.parametrize("bad", [0.0, -0.5, 1.1])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            lifetime_round_trips(bad)

    def test_monotone_in_reflectivity_and_loss(self):
        taus_r = [
            lifetime_round_trips(survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=r)))
            for r in (0.97, 0.98, 0.99, 0.999)
        ]
        assert taus_r == sorted(taus_r)
        taus_l = [
            lifetime_round_trips(survival_per_round_trip(FiberCavity(1.285, 1.478, loss, facet_reflectivity=0.99)))
            for loss in (0.0, 2.0, 5.0, 10.0)
        ]
        assert taus_l == sorted(taus_l, reverse=True)

    @given(st.floats(min_value=0.5, max_value=1.0))
    def test_unit_reflectivity_bound(self, r):
        p_r = survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=r))
        p_1 = survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=1.0))
        assert lifetime_round_trips(p_r) <= lifetime_round_trips(p_1) + 1e-9


class TestReflectivityInversion:
    def test_bound_case(self):
        assert reflectivity_from_lifetime(338.1, PAPERLIKE) == pytest.approx(1.0, abs=1e-3)

    def test_storage_wavelength_point(self):
        r = reflectivity_from_lifetime(39.7, PAPERLIKE)
        # cross-check by forward evaluation
        p = survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=r))
        assert lifetime_round_trips(p) == pytest.approx(39.7, rel=1e-9)
        assert r == pytest.approx(0.98897, abs=2e-5)

    def test_long_wavelength_point(self):
        assert reflectivity_from_lifetime(87.0, PAPERLIKE) == pytest.approx(0.99569, abs=2e-5)

    @given(st.floats(min_value=1.0, max_value=337.0))
    def test_round_trip_identity(self, tau):
        r = reflectivity_from_lifetime(tau, PAPERLIKE)
        p = survival_per_round_trip(FiberCavity(1.285, 1.478, 5.0, facet_reflectivity=r))
        assert lifetime_round_trips(p) == pytest.approx(tau, rel=1e-9)

    def test_infeasible_lifetime(self):
        with pytest.raises(InfeasibleError):
            reflectivity_from_lifetime(400.0, PAPERLIKE)


class TestRingDownExpectedCounts:
    def test_geometric_decay(self):
        model = RingDownModel(12.67, 0.5)
        assert list(ring_down_expected_counts(model, 1000.0, 3)) == [1000.0, 500.0, 250.0]

    def test_lossless_constant(self):
        model = RingDownModel(12.67, 1.0)
        assert np.allclose(ring_down_expected_counts(model, 7.0, 5), 7.0)

    def test_one_over_e_after_lifetime(self):
        model = RingDownModel(12.67, math.exp(-1 / 16))
        counts = ring_down_expected_counts(model, 1.0, 17)
        assert counts[16] / counts[0] == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_adjacent_bin_ratio_is_survival(self):
        model = RingDownModel(12.67, 0.93)
        counts = ring_down_expected_counts(model, 123.0, 20)
        ratios = counts[1:] / counts[:-1]
        assert np.allclose(ratios, 0.93, rtol=1e-12)
        assert np.all(np.diff(counts) < 0)

    def test_lifetime_survival_consistency(self):
        assert survival_for_lifetime(16.0) == pytest.approx(math.exp(-1 / 16), rel=1e-12)
