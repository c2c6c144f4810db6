"""Тесты протокола IVU."""

import pytest

from core.beacon import BeaconPayload
from core.errors import BadCrcError, DomainError, InsufficientDataError
from core.ivu import (
    IvuConfig,
    IvuPhase,
    IvuState,
    RssiWindow,
    Trend,
    active_speed_limit,
    classify_trend,
    effective_payload,
    fir_filter,
    on_beacon,
    on_rssi_sample,
    update_zone,
)
from core.kinematics import VehicleState, kmh_to_mps

U120 = kmh_to_mps(120)
BUMP = kmh_to_mps(6)


def _ramp(start_dbm, end_dbm, seconds=10.0, rate_hz=10):
    n = int(seconds * rate_hz)
    return [(i / rate_hz, start_dbm + (end_dbm - start_dbm) * i / n) for i in range(n + 1)]


def _window(samples, capacity=10.0):
    window = RssiWindow(capacity)
    for t, rssi in samples:
        window.push(t, rssi)
    return window


def _limiting(u=U120, trigger_odometer=100.0, payload=BeaconPayload(6, 20)):
    return IvuState(
        phase=IvuPhase.LIMITING,
        trigger_odometer_m=trigger_odometer,
        u_at_trigger_mps=u,
        payload=payload,
    )


class TestFir:
    def test_constant(self):
        assert fir_filter([-50, -50, -50], 2) == [-50]

    def test_mean(self):
        assert fir_filter([-70, -67, -64], 2) == [pytest.approx(-67)]
        assert fir_filter([-70, -67, -64, -61], 2) == [pytest.approx(-67), pytest.approx(-64)]

    def test_order_zero_is_identity(self):
        assert fir_filter([-1.0, -2.0], 0) == [-1.0, -2.0]

    def test_bounded_by_window(self):
        samples = [-60, -45, -72, -50, -58, -41]
        for i, y in enumerate(fir_filter(samples, 2)):
            window = samples[i:i + 3]
            assert min(window) <= y <= max(window)

    def test_too_short(self):
        with pytest.raises(DomainError):
            fir_filter([-50, -50], 2)


class TestWindow:
    def test_keeps_capacity(self):
        window = _window(_ramp(-80, -60, seconds=20))
        assert window.span_s == pytest.approx(10.0)
        assert window.samples[0][0] == pytest.approx(10.0)

    def test_strictly_increasing(self):
        window = _window([(0.0, -70.0), (0.1, -69.0)])
        with pytest.raises(DomainError):
            window.push(0.1, -68.0)

    def test_latest_filtered(self):
        window = _window([(0.0, -70.0), (0.1, -67.0)])
        assert window.latest_filtered(2) is None
        window.push(0.2, -64.0)
        assert window.latest_filtered(2) == pytest.approx(-67.0)


class TestClassifyTrend:
    def test_approaching(self):
        assert classify_trend(_window(_ramp(-80, -60)), IvuConfig()) == Trend.APPROACHING

    def test_departing(self):
        assert classify_trend(_window(_ramp(-60, -80)), IvuConfig()) == Trend.DEPARTING

    def test_flat(self):
        assert classify_trend(_window(_ramp(-70, -70)), IvuConfig()) == Trend.INDETERMINATE

    def test_within_hysteresis(self):
        assert classify_trend(_window(_ramp(-70, -69.5)), IvuConfig()) == Trend.INDETERMINATE

    def test_underfilled(self):
        with pytest.raises(InsufficientDataError):
            classify_trend(_window(_ramp(-80, -60, seconds=5)), IvuConfig())


class TestOnRssiSample:
    def _feed(self, samples, state=None, odometer=0.0, config=IvuConfig()):
        window = RssiWindow(config.acquisition_s)
        state = state or IvuState()
        vehicle = VehicleState(speed_mps=U120, odometer_m=odometer, desired_speed_mps=U120)
        for sample in samples:
            state = on_rssi_sample(state, window, sample, vehicle, config)
        return state, window

    def test_first_sample_acquiring(self):
        state, _ = self._feed([(0.0, -80.0)])
        assert state.phase == IvuPhase.ACQUIRING

    def test_classified_approaching(self):
        state, _ = self._feed(_ramp(-80, -60))
        assert state.phase == IvuPhase.APPROACHING

    def test_classified_departing_never_triggers(self):
        state, _ = self._feed(_ramp(-30, -40) + [(10.1, -40.0), (10.2, -40.0)])
        assert state.phase == IvuPhase.DEPARTING
        assert state.trigger_odometer_m is None

    def test_indeterminate_keeps_acquiring(self):
        state, _ = self._feed(_ramp(-70, -70))
        assert state.phase == IvuPhase.ACQUIRING

    def test_trigger_on_crossing(self):
        samples = _ramp(-80, -49.5) + [(10.1, -49.0), (10.2, -48.0), (10.3, -47.0), (10.4, -46.0)]
        state, _ = self._feed(samples, odometer=250.0)
        assert state.phase == IvuPhase.LIMITING
        assert state.trigger_odometer_m == 250.0
        assert state.u_at_trigger_mps == pytest.approx(U120)
        # среднее (−49, −48, −47) первым достигает порога
        assert state.trigger_rssi_dbm == pytest.approx(-48.0)

    def test_trigger_is_write_once(self):
        samples = _ramp(-80, -47) + [(10.1, -46.0), (10.2, -45.0), (10.3, -44.0)]
        state, window = self._feed(samples, odometer=10.0)
        anchor = state.trigger_odometer_m
        vehicle = VehicleState(speed_mps=U120, odometer_m=99.0, desired_speed_mps=U120)
        state = on_rssi_sample(state, window, (10.4, -40.0), vehicle, IvuConfig())
        assert state.trigger_odometer_m == anchor

    def test_deferred_trigger_flagged(self):
        samples = [(i / 10, -45.0 + i * 0.05) for i in range(5)]
        state, _ = self._feed(samples)
        assert state.phase == IvuPhase.ACQUIRING
        assert state.trigger_deferred

    def test_malformed_samples_dropped(self):
        state, _ = self._feed([(0.0, -80.0), (0.0, -79.0), (0.1, float("nan"))])
        assert state.dropped_samples == 2
        assert state.phase == IvuPhase.ACQUIRING


class TestOnBeacon:
    def test_stores_first_payload(self):
        state = on_beacon(IvuState(), BeaconPayload(6, 20))
        assert state.payload == BeaconPayload(6, 20)
        assert state.decode_attempts == 1

    def test_idempotent(self):
        state = on_beacon(on_beacon(IvuState(), BeaconPayload(6, 20)), BeaconPayload(6, 20))
        assert state.payload == BeaconPayload(6, 20)
        assert state.decode_attempts == 2

    def test_failures_use_fallback(self):
        state = IvuState()
        for _ in range(5):
            state = on_beacon(state, BadCrcError("crc"))
        assert state.payload is None
        assert state.decode_failures == 5
        assert effective_payload(state, IvuConfig()) == BeaconPayload(6, 20)


class TestActiveSpeedLimit:
    def _limit(self, state, odometer, friction):
        vehicle = VehicleState(odometer_m=odometer)
        return active_speed_limit(state, vehicle, friction, IvuConfig())

    def test_idle_is_max_legal(self, friction):
        assert self._limit(IvuState(), 0.0, friction) == pytest.approx(U120)

    def test_profile(self, friction):
        assert self._limit(_limiting(), 140.0, friction) == pytest.approx(23.48, abs=0.01)

    def test_floor_at_bump_speed(self, friction):
        assert self._limit(_limiting(), 179.4, friction) == pytest.approx(BUMP)

    def test_non_increasing_while_limiting(self, friction):
        state = _limiting()
        limits = [self._limit(state, 100.0 + s * 0.5, friction) for s in range(200)]
        assert all(a >= b for a, b in zip(limits, limits[1:]))
        assert min(limits) == pytest.approx(BUMP)

    def test_slow_vehicle_never_bound(self, friction):
        state = _limiting(u=1.0)
        assert self._limit(state, 100.0, friction) == pytest.approx(BUMP)

    def test_zone_then_reset(self, friction):
        state = IvuState(
            phase=IvuPhase.NEAR_ZERO_ZONE,
            trigger_odometer_m=100.0,
            u_at_trigger_mps=U120,
            payload=BeaconPayload(6, 20),
            zone_entry_odometer_m=180.0,
        )
        assert self._limit(state, 190.0, friction) == pytest.approx(BUMP)
        assert self._limit(state, 200.0, friction) == pytest.approx(U120)

    def test_fallback_payload_in_zone(self, friction):
        state = _limiting(payload=None)
        assert self._limit(state, 300.0, friction) == pytest.approx(BUMP)


class TestUpdateZone:
    def test_entry_at_profile_end(self, friction):
        state = _limiting()
        zone_start = 100.0 + (U120 ** 2 - BUMP ** 2) / 14.0
        before = update_zone(state, VehicleState(odometer_m=zone_start - 0.1), friction, IvuConfig())
        assert before.phase == IvuPhase.LIMITING
        after = update_zone(state, VehicleState(odometer_m=zone_start + 0.1), friction, IvuConfig())
        assert after.phase == IvuPhase.NEAR_ZERO_ZONE
        assert after.zone_entry_odometer_m == pytest.approx(zone_start)

    def test_exit_recorded(self, friction):
        state = update_zone(_limiting(), VehicleState(odometer_m=180.0), friction, IvuConfig())
        entry = state.zone_entry_odometer_m
        state = update_zone(state, VehicleState(odometer_m=entry + 20.0), friction, IvuConfig())
        assert state.zone_exit_odometer_m == pytest.approx(entry + 20.0)


def test_config_validation():
    with pytest.raises(DomainError):
        IvuConfig(trigger_rssi_dbm=5.0)
    with pytest.raises(DomainError):
        IvuConfig(fallback_speed_kmh=30)
    with pytest.raises(DomainError):
        IvuConfig(acquisition_s=0.0)
