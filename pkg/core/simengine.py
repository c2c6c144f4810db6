"""
Детерминированный мир с фиксированным шагом.

На каждом шаге:
1. применяются плановые изменения RSU;
2. для каждого маяка шага считается расстояние до RSU; маяк ниже
   чувствительности приёмника не доставляется, иначе формируется отсчёт
   RSSI и попытка декодирования, результат передаётся IVU;
3. IVU обновляет зону и выдаёт ограничение скорости;
4. автомобиль делает шаг интегрирования.

Трасса пишется на каждом шаге, даже без маяков.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .beacon import BeaconPayload, apply_change, beacon_indices_in_interval, decode_frame, encode_frame
from .errors import DomainError, FrameDecodeError
from .ivu import (
    IvuState,
    RssiWindow,
    active_speed_limit,
    effective_payload,
    on_beacon,
    on_rssi_sample,
    update_zone,
)
from .kinematics import kmh_to_mps, step_vehicle
from .propagation import distance_from_rssi, received_power_dbm, sample_rssi
from .scenario import Scenario

logger = logging.getLogger(__name__)


# Ближе 1 м формулы дальней зоны не применяются
MIN_CHANNEL_DISTANCE_M = 1.0

# Номера независимых потоков случайных чисел (поток 0: затенение)
LOSS_STREAM = 1
CORRUPTION_STREAM = 2

# Допуск проверки скорости в зоне, м/с
ACCEPTANCE_TOLERANCE_MPS = 0.1

TRACE_COLUMNS = (
    "t_s",
    "position_m",
    "speed_mps",
    "rssi_raw_dbm",
    "rssi_filtered_dbm",
    "ivu_phase",
    "active_limit_mps",
    "beacon_decode_status",
)

# Статусы маяка в трассе, помимо кодов ошибок декодирования
STATUS_NONE = ""
STATUS_OK = "ok"
STATUS_UNDELIVERED = "undelivered"
STATUS_LOST = "lost"


@dataclass(frozen=True)
class TraceRecord:
    t_s: float
    position_m: float
    speed_mps: float
    rssi_raw_dbm: Optional[float]
    rssi_filtered_dbm: Optional[float]
    ivu_phase: str
    active_limit_mps: float
    beacon_decode_status: str


@dataclass(frozen=True)
class RunSummary:
    """Итоги прогона."""

    triggered: bool
    trigger_odometer_m: Optional[float] = None
    trigger_position_m: Optional[float] = None
    trigger_distance_m: Optional[float] = None
    analytic_trigger_distance_m: Optional[float] = None
    anchor_error_m: Optional[float] = None
    u_at_trigger_mps: Optional[float] = None
    bump_site_speed_mps: Optional[float] = None
    bump_speed_mps: Optional[float] = None
    zone_entry_odometer_m: Optional[float] = None
    zone_exit_odometer_m: Optional[float] = None
    decode_attempts: int = 0
    decode_failures: int = 0
    payload_decoded: bool = False
    trigger_deferred: bool = False

    @property
    def passed(self) -> bool:
        """Скорость у зоны не выше заданной в полезной нагрузке (с допуском)."""
        if not self.triggered or self.bump_site_speed_mps is None:
            return False
        return self.bump_site_speed_mps <= self.bump_speed_mps + ACCEPTANCE_TOLERANCE_MPS


@dataclass(frozen=True)
class SimulationResult:
    trace: List[TraceRecord]
    ivu_state: IvuState
    summary: RunSummary


def _uniform(seed: int, index: int, stream: int) -> float:
    return float(np.random.default_rng([seed, index, stream]).random())


def _corrupt(frame: bytes, seed: int, index: int) -> bytes:
    """Инвертирует один бит кадра (позиция из отдельного потока)."""
    bit = int(np.random.default_rng([seed, index, CORRUPTION_STREAM, 1]).integers(0, len(frame) * 8))
    corrupted = bytearray(frame)
    corrupted[bit // 8] ^= 1 << (bit % 8)
    return bytes(corrupted)


def simulate(scenario: Scenario) -> SimulationResult:
    """Прогон сценария с трассой, конечным состоянием IVU и итогами."""
    ivu_config = scenario.ivu_config
    friction = scenario.friction
    shadowing = scenario.shadowing
    dt = scenario.dt_s

    rsu = scenario.rsu
    pending_changes = list(scenario.rsu_changes)
    window = RssiWindow(capacity_s=ivu_config.acquisition_s)
    state = IvuState()
    vehicle = scenario.vehicle_initial
    trace: List[TraceRecord] = []

    n_ticks = int(round(scenario.duration_s / dt))
    # сквозной номер маяка; после смены периода номера на сетке повторяются
    draw_index = 0
    logger.debug("Прогон: %d шагов по %.4f с", n_ticks, dt)

    for k in range(n_ticks):
        t = k * dt
        t_next = (k + 1) * dt

        while pending_changes and pending_changes[0].at_s <= t + 1e-9:
            change = pending_changes.pop(0)
            rsu = apply_change(rsu, change)
            logger.info("t=%.2f: настройки RSU изменены (%s)", t, change)

        raw_rssi: Optional[float] = None
        status = STATUS_NONE
        for index in beacon_indices_in_interval(rsu, t, t_next):
            beacon_t = index * rsu.beacon_interval_s
            draw = draw_index
            draw_index += 1
            distance = max(abs(rsu.rsu_position_m - vehicle.position_m), MIN_CHANNEL_DISTANCE_M)
            if received_power_dbm(rsu.radio, distance) < rsu.radio.rx_sensitivity_dbm:
                status = STATUS_UNDELIVERED
                continue
            if scenario.loss_probability > 0 and \
                    _uniform(shadowing.seed, draw, LOSS_STREAM) < scenario.loss_probability:
                status = STATUS_LOST
                continue

            rssi = sample_rssi(rsu.radio, distance, shadowing, draw)
            frame = encode_frame(rsu.payload)
            if scenario.corruption_probability > 0 and \
                    _uniform(shadowing.seed, draw, CORRUPTION_STREAM) < scenario.corruption_probability:
                frame = _corrupt(frame, shadowing.seed, draw)
            try:
                decoded = decode_frame(frame)
                status = STATUS_OK
            except FrameDecodeError as e:
                decoded = e
                status = e.status

            state = on_beacon(state, decoded)
            state = on_rssi_sample(state, window, (beacon_t, rssi), vehicle, ivu_config)
            raw_rssi = rssi

        # ограничение задаётся на точку, которую автомобиль пройдёт к концу шага
        lookahead = replace(vehicle, odometer_m=vehicle.odometer_m + vehicle.speed_mps * dt)
        state = update_zone(state, lookahead, friction, ivu_config)
        limit = active_speed_limit(state, lookahead, friction, ivu_config)
        state = replace(state, active_limit_mps=limit)

        trace.append(TraceRecord(
            t_s=t,
            position_m=vehicle.position_m,
            speed_mps=vehicle.speed_mps,
            rssi_raw_dbm=raw_rssi,
            rssi_filtered_dbm=state.last_filtered_dbm,
            ivu_phase=state.phase.value,
            active_limit_mps=limit,
            beacon_decode_status=status,
        ))
        vehicle = step_vehicle(vehicle, limit, friction, dt)

    return SimulationResult(trace=trace, ivu_state=state, summary=summarize(scenario, trace, state))


def run(scenario: Scenario) -> List[TraceRecord]:
    """Прогон сценария; возвращает трассу."""
    return simulate(scenario).trace


def _speed_at_position(trace: List[TraceRecord], position_m: float) -> Optional[float]:
    """Скорость при первом достижении позиции (линейная интерполяция между шагами)."""
    previous = None
    for record in trace:
        if record.position_m >= position_m:
            if previous is None or record.position_m == previous.position_m:
                return record.speed_mps
            frac = (position_m - previous.position_m) / (record.position_m - previous.position_m)
            return previous.speed_mps + frac * (record.speed_mps - previous.speed_mps)
        previous = record
    return None


def summarize(scenario: Scenario, trace: List[TraceRecord], state: IvuState) -> RunSummary:
    """
    Итоги прогона.

    bump_site_speed_mps: скорость в точке срабатывания плюс расстояние
    RSU → зона, то есть там, где опорная точка помещает зону.
    """
    config = scenario.ivu_config
    payload: BeaconPayload = effective_payload(state, config)
    common = dict(
        decode_attempts=state.decode_attempts,
        decode_failures=state.decode_failures,
        payload_decoded=state.payload is not None,
        trigger_deferred=state.trigger_deferred,
        bump_speed_mps=kmh_to_mps(payload.bump_speed_kmh),
    )
    if state.trigger_odometer_m is None:
        return RunSummary(triggered=False, **common)

    start = scenario.vehicle_initial
    trigger_position = start.position_m + (state.trigger_odometer_m - start.odometer_m)
    trigger_distance = scenario.rsu.rsu_position_m - trigger_position
    analytic = distance_from_rssi(scenario.radio, config.trigger_rssi_dbm)

    site_speed = _speed_at_position(trace, trigger_position + scenario.rsu_to_bump_m)

    return RunSummary(
        triggered=True,
        trigger_odometer_m=state.trigger_odometer_m,
        trigger_position_m=trigger_position,
        trigger_distance_m=trigger_distance,
        analytic_trigger_distance_m=analytic,
        anchor_error_m=abs(trigger_distance - analytic),
        u_at_trigger_mps=state.u_at_trigger_mps,
        bump_site_speed_mps=site_speed,
        zone_entry_odometer_m=state.zone_entry_odometer_m,
        zone_exit_odometer_m=state.zone_exit_odometer_m,
        **common,
    )


def format_sig(value: Optional[float], digits: int = 6) -> str:
    """Число с заданным количеством значащих цифр; None — пустая строка."""
    if value is None:
        return ""
    if value == 0:
        return "0"
    return format(value, f".{digits}g")


def write_trace_csv(trace: List[TraceRecord]) -> str:
    """Трасса в CSV: заголовок и по строке на шаг."""
    if not trace:
        raise DomainError("трасса пуста")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in trace:
        writer.writerow([
            format_sig(r.t_s),
            format_sig(r.position_m),
            format_sig(r.speed_mps),
            format_sig(r.rssi_raw_dbm),
            format_sig(r.rssi_filtered_dbm),
            r.ivu_phase,
            format_sig(r.active_limit_mps),
            r.beacon_decode_status,
        ])
    return buf.getvalue()


def import_rssi_trace(text: str) -> List[Tuple[float, float]]:
    """
    Читает внешнюю запись RSSI (`distance_m,rssi_dbm`) в пары значений.

    Точка подключения измеренных данных; сравнение с ними не выполняется.
    """
    pairs: List[Tuple[float, float]] = []
    reader = csv.reader(io.StringIO(text))
    for row in reader:
        if not row or row[0].strip().startswith("#"):
            continue
        try:
            distance, rssi = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            # строка заголовка или мусор
            continue
        if math.isfinite(distance) and math.isfinite(rssi):
            pairs.append((distance, rssi))
    return pairs
