"""Тесты модели радиоканала."""

import math

import numpy as np
import pytest

from core.errors import DomainError, NoCoverageError, OutOfModelError
from core.propagation import (
    RadioLinkParams,
    ShadowingModel,
    bisect_range_m,
    distance_from_rssi,
    fspl_db,
    link_margin_db,
    max_range_m,
    received_power_dbm,
    rssi_trace,
    sample_rssi,
    shadowing_draw,
)

F = 2.4e9


class TestFspl:
    def test_400m(self):
        assert fspl_db(400.0, F) == pytest.approx(92.1, abs=0.05)

    def test_1m_and_100m(self):
        assert fspl_db(1.0, F) == pytest.approx(40.05, abs=0.01)
        assert fspl_db(100.0, F) == pytest.approx(fspl_db(1.0, F) + 40.0, abs=1e-9)

    def test_doubling_distance_adds_6_02_db(self):
        for d in (1.0, 7.5, 400.0, 2000.0):
            assert fspl_db(2 * d, F) - fspl_db(d, F) == pytest.approx(20 * math.log10(2), abs=1e-6)

    def test_increasing_in_frequency(self):
        assert fspl_db(100.0, 5.9e9) > fspl_db(100.0, F)

    @pytest.mark.parametrize("distance, frequency", [(0.0, F), (-1.0, F), (10.0, 0.0)])
    def test_domain(self, distance, frequency):
        with pytest.raises(DomainError):
            fspl_db(distance, frequency)


class TestLinkBudget:
    def test_received_power_400m(self, radio):
        assert received_power_dbm(radio, 400.0) == pytest.approx(-74.1, abs=0.1)

    def test_trigger_reference_point(self, radio):
        assert received_power_dbm(radio, 19.8) == pytest.approx(-48.0, abs=0.2)

    def test_budget_identity_without_gains(self):
        bare = RadioLinkParams(tx_gain_dbi=0, tx_loss_db=0, misc_loss_db=0, rx_gain_dbi=0, rx_loss_db=0)
        assert received_power_dbm(bare, 123.0) == pytest.approx(bare.tx_power_dbm - fspl_db(123.0, F))

    def test_margin(self, radio):
        assert link_margin_db(radio, 400.0) == pytest.approx(15.9, abs=0.2)
        assert link_margin_db(radio, 100.0) == pytest.approx(27.95, abs=0.2)

    def test_margin_monotone(self, radio):
        margins = [link_margin_db(radio, d) for d in np.linspace(1, 3000, 200)]
        assert all(a > b for a, b in zip(margins, margins[1:]))

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            RadioLinkParams(frequency_hz=0)
        with pytest.raises(DomainError):
            RadioLinkParams(rx_loss_db=-1)
        with pytest.raises(DomainError):
            RadioLinkParams(rx_sensitivity_dbm=20)


class TestRange:
    def test_default_range(self, radio):
        assert max_range_m(radio) == pytest.approx(2497.6, rel=1e-3)

    def test_matches_bisection(self, radio):
        assert max_range_m(radio) == pytest.approx(bisect_range_m(radio), abs=0.01)

    def test_sensitivity_at_400m(self, radio):
        params = RadioLinkParams(rx_sensitivity_dbm=received_power_dbm(radio, 400.0))
        assert max_range_m(params) == pytest.approx(400.0, abs=0.5)

    def test_20db_is_one_decade(self, radio):
        stronger = RadioLinkParams(tx_power_dbm=radio.tx_power_dbm + 20, rx_sensitivity_dbm=-90)
        assert max_range_m(stronger) == pytest.approx(10 * max_range_m(radio), rel=0.01)

    def test_no_coverage(self):
        weak = RadioLinkParams(tx_power_dbm=-60, rx_sensitivity_dbm=-61, tx_gain_dbi=0, rx_gain_dbi=0)
        with pytest.raises(NoCoverageError):
            max_range_m(weak)


class TestDistanceFromRssi:
    def test_400m(self, radio):
        assert distance_from_rssi(radio, -74.1) == pytest.approx(400.0, rel=0.005)

    def test_inverse_of_budget(self, radio):
        for d in np.geomspace(1.0, 1e4, 57):
            assert distance_from_rssi(radio, received_power_dbm(radio, d)) == pytest.approx(d, rel=1e-6)

    def test_stronger_than_1m(self, radio):
        with pytest.raises(OutOfModelError):
            distance_from_rssi(radio, received_power_dbm(radio, 1.0) + 1.0)


class TestShadowing:
    def test_sigma_zero_is_exact(self, radio):
        model = ShadowingModel(sigma_db=0.0, seed=5)
        assert sample_rssi(radio, 400.0, model, 3) == received_power_dbm(radio, 400.0)

    def test_deterministic_per_index(self, radio):
        model = ShadowingModel(sigma_db=3.0, seed=11)
        assert sample_rssi(radio, 400.0, model, 7) == sample_rssi(radio, 400.0, model, 7)
        assert shadowing_draw(model, 7) != shadowing_draw(model, 8)

    def test_independent_of_query_order(self, radio):
        model = ShadowingModel(sigma_db=3.0, seed=2)
        forward = rssi_trace(radio, [100.0] * 5, model)
        single = sample_rssi(radio, 100.0, model, 4)
        assert forward[4] == single

    def test_statistics(self, radio):
        model = ShadowingModel(sigma_db=3.0, seed=1)
        samples = np.array([sample_rssi(radio, 400.0, model, i) for i in range(10_000)])
        assert samples.mean() == pytest.approx(-74.1, abs=0.2)
        assert samples.std() == pytest.approx(3.0, rel=0.1)

    def test_invalid(self):
        with pytest.raises(DomainError):
            ShadowingModel(sigma_db=-1.0)
        with pytest.raises(DomainError):
            ShadowingModel(seed=-3)
