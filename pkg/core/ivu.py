"""
Бортовой блок (IVU): протокол работы приёмника в автомобиле.

Последовательность фаз:
    Idle → Acquiring → Approaching | Departing
    Approaching → Limiting (отфильтрованный RSSI достиг порога −48 дБм)
    Limiting → NearZeroZone (ограничение дошло до скорости в зоне)

После срабатывания расстояние считается по одометру от опорной точки,
ограничение скорости следует профилю v = √(u² − 2μgs).
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Deque, List, Optional, Sequence, Tuple, Union

from .beacon import BeaconPayload, MAX_BUMP_SPEED_KMH
from .errors import DomainError, FrameDecodeError, InsufficientDataError
from .kinematics import FrictionModel, VehicleState, kmh_to_mps, speed_at_distance_mps

logger = logging.getLogger(__name__)


class IvuPhase(str, Enum):
    IDLE = "Idle"
    ACQUIRING = "Acquiring"
    APPROACHING = "Approaching"
    DEPARTING = "Departing"
    LIMITING = "Limiting"
    NEAR_ZERO_ZONE = "NearZeroZone"


class Trend(str, Enum):
    APPROACHING = "Approaching"
    DEPARTING = "Departing"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class IvuConfig:
    """Настройки IVU."""

    trigger_rssi_dbm: float = -48.0
    acquisition_s: float = 10.0
    max_legal_speed_kmh: float = 120.0
    fallback_speed_kmh: int = 6
    fallback_zone_m: int = 20
    trend_hysteresis_db: float = 1.0
    filter_order: int = 2

    def __post_init__(self):
        if not self.trigger_rssi_dbm < 0:
            raise DomainError("trigger_rssi_dbm должен быть < 0")
        if not self.acquisition_s > 0:
            raise DomainError("acquisition_s должно быть > 0")
        if not 0 < self.fallback_speed_kmh <= MAX_BUMP_SPEED_KMH:
            raise DomainError(f"fallback_speed_kmh должна быть в (0, {MAX_BUMP_SPEED_KMH}]")
        if not self.fallback_zone_m > 0:
            raise DomainError("fallback_zone_m должна быть > 0")
        if not self.max_legal_speed_kmh >= self.fallback_speed_kmh:
            raise DomainError("max_legal_speed_kmh не может быть меньше скорости в зоне")
        if self.trend_hysteresis_db < 0:
            raise DomainError("trend_hysteresis_db не может быть отрицательным")
        if self.filter_order < 0:
            raise DomainError("filter_order не может быть отрицательным")

    @property
    def fallback_payload(self) -> BeaconPayload:
        return BeaconPayload(self.fallback_speed_kmh, self.fallback_zone_m)

    @property
    def max_legal_speed_mps(self) -> float:
        return kmh_to_mps(self.max_legal_speed_kmh)


class RssiWindow:
    """
    Скользящее окно отсчётов RSSI фиксированной длительности.

    Хранит пары (время, дБм) за последние capacity_s секунд (включительно).
    """

    def __init__(self, capacity_s: float = 10.0):
        if not capacity_s > 0:
            raise DomainError("длительность окна должна быть > 0")
        self.capacity_s = capacity_s
        self._samples: Deque[Tuple[float, float]] = deque()

    def push(self, t_s: float, rssi_dbm: float) -> None:
        if self._samples and t_s <= self._samples[-1][0]:
            raise DomainError("время отсчётов должно строго возрастать")
        self._samples.append((t_s, rssi_dbm))
        horizon = t_s - self.capacity_s - 1e-9
        while self._samples[0][0] < horizon:
            self._samples.popleft()

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(self._samples)

    @property
    def values(self) -> List[float]:
        return [rssi for _, rssi in self._samples]

    @property
    def last_time_s(self) -> Optional[float]:
        return self._samples[-1][0] if self._samples else None

    @property
    def span_s(self) -> float:
        if len(self._samples) < 2:
            return 0.0
        return self._samples[-1][0] - self._samples[0][0]

    def latest_filtered(self, order: int) -> Optional[float]:
        """Последнее значение КИХ-фильтра или None, если отсчётов мало."""
        if len(self._samples) <= order:
            return None
        tail = [rssi for _, rssi in list(self._samples)[-(order + 1):]]
        return sum(tail) / (order + 1)

    def __len__(self) -> int:
        return len(self._samples)


@dataclass(frozen=True)
class IvuState:
    """Состояние протокола IVU."""

    phase: IvuPhase = IvuPhase.IDLE
    trigger_odometer_m: Optional[float] = None
    u_at_trigger_mps: Optional[float] = None
    payload: Optional[BeaconPayload] = None
    zone_entry_odometer_m: Optional[float] = None
    zone_exit_odometer_m: Optional[float] = None
    active_limit_mps: Optional[float] = None
    last_filtered_dbm: Optional[float] = None
    trigger_rssi_dbm: Optional[float] = None
    trigger_deferred: bool = False
    decode_attempts: int = 0
    decode_failures: int = 0
    dropped_samples: int = 0


DecodeResult = Union[BeaconPayload, FrameDecodeError]
RssiSample = Tuple[float, float]


def fir_filter(samples: Sequence[float], order: int) -> List[float]:
    """
    КИХ-фильтр скользящего среднего порядка N (коэффициенты 1/(N+1)).

    Returns:
        Список длиной len(samples) − order
    """
    if order < 0:
        raise DomainError("порядок фильтра не может быть отрицательным")
    if len(samples) <= order:
        raise DomainError(
            f"для фильтра порядка {order} нужно больше {order} отсчётов, получено {len(samples)}"
        )
    width = order + 1
    return [
        sum(samples[n - order:n + 1]) / width
        for n in range(order, len(samples))
    ]


def classify_trend(window: RssiWindow, config: IvuConfig) -> Trend:
    """Определяет по отфильтрованному RSSI, приближается ли автомобиль к RSU."""
    if window.span_s < config.acquisition_s - 1e-9:
        raise InsufficientDataError(
            f"окно RSSI {window.span_s:.2f} с, нужно {config.acquisition_s:.2f} с"
        )
    values = window.values
    if len(values) < config.filter_order + 2:
        raise InsufficientDataError("недостаточно отсчётов для оценки тренда")
    filtered = fir_filter(values, config.filter_order)
    change = filtered[-1] - filtered[0]
    if change >= config.trend_hysteresis_db:
        return Trend.APPROACHING
    if change <= -config.trend_hysteresis_db:
        return Trend.DEPARTING
    return Trend.INDETERMINATE


def effective_payload(state: IvuState, config: IvuConfig) -> BeaconPayload:
    """Декодированная полезная нагрузка или резервная (6 км/ч на 20 м)."""
    return state.payload if state.payload is not None else config.fallback_payload


def on_beacon(state: IvuState, decode_result: DecodeResult) -> IvuState:
    """Учитывает результат декодирования очередного маяка."""
    attempts = state.decode_attempts + 1
    if isinstance(decode_result, FrameDecodeError):
        logger.debug("Маяк не декодирован: %s", decode_result.status)
        return replace(state, decode_attempts=attempts, decode_failures=state.decode_failures + 1)
    if state.payload is None:
        logger.debug("Полезная нагрузка получена: %s", decode_result)
        return replace(state, decode_attempts=attempts, payload=decode_result)
    return replace(state, decode_attempts=attempts)


def on_rssi_sample(state: IvuState, window: RssiWindow, sample: RssiSample,
                   vehicle: VehicleState, config: IvuConfig) -> IvuState:
    """
    Обрабатывает отсчёт RSSI по протоколу IVU.

    Некорректные отсчёты (не число, время не возрастает) отбрасываются
    и учитываются в dropped_samples.
    """
    t_s, rssi_dbm = sample
    last_t = window.last_time_s
    if not (math.isfinite(t_s) and math.isfinite(rssi_dbm)) or (last_t is not None and t_s <= last_t):
        return replace(state, dropped_samples=state.dropped_samples + 1)

    window.push(t_s, rssi_dbm)
    filtered = window.latest_filtered(config.filter_order)
    state = replace(state, last_filtered_dbm=filtered)

    if state.phase == IvuPhase.IDLE:
        logger.debug("t=%.2f: первый отсчёт, начат сбор RSSI", t_s)
        state = replace(state, phase=IvuPhase.ACQUIRING)

    if state.phase == IvuPhase.ACQUIRING:
        if window.span_s < config.acquisition_s - 1e-9:
            if filtered is not None and filtered >= config.trigger_rssi_dbm and not state.trigger_deferred:
                logger.warning(
                    "t=%.2f: порог %.1f дБм достигнут до завершения сбора RSSI, срабатывание отложено",
                    t_s, config.trigger_rssi_dbm,
                )
                state = replace(state, trigger_deferred=True)
            return state
        try:
            trend = classify_trend(window, config)
        except InsufficientDataError:
            # окно набрало длительность, но отсчётов для фильтра ещё мало
            return state
        if trend == Trend.INDETERMINATE:
            return state
        phase = IvuPhase.APPROACHING if trend == Trend.APPROACHING else IvuPhase.DEPARTING
        logger.debug("t=%.2f: тренд %s", t_s, trend.value)
        state = replace(state, phase=phase)

    if state.phase == IvuPhase.APPROACHING and filtered is not None \
            and filtered >= config.trigger_rssi_dbm:
        logger.info(
            "t=%.2f: срабатывание на %.2f дБм, одометр %.2f м, скорость %.2f м/с",
            t_s, filtered, vehicle.odometer_m, vehicle.speed_mps,
        )
        state = replace(
            state,
            phase=IvuPhase.LIMITING,
            trigger_odometer_m=vehicle.odometer_m,
            u_at_trigger_mps=vehicle.speed_mps,
            trigger_rssi_dbm=filtered,
        )
    return state


def _zone_start_distance_m(state: IvuState, friction: FrictionModel, config: IvuConfig) -> float:
    """Путь от опорной точки, на котором профиль доходит до скорости в зоне."""
    bump = kmh_to_mps(effective_payload(state, config).bump_speed_kmh)
    u = state.u_at_trigger_mps
    return max(0.0, (u * u - bump * bump) / (2.0 * friction.braking_mps2))


def update_zone(state: IvuState, vehicle: VehicleState, friction: FrictionModel,
                config: IvuConfig) -> IvuState:
    """Переходы Limiting → NearZeroZone и снятие ограничения после зоны."""
    if state.phase == IvuPhase.LIMITING:
        zone_start = state.trigger_odometer_m + _zone_start_distance_m(state, friction, config)
        if vehicle.odometer_m >= zone_start:
            logger.info("Въезд в зону малой скорости, одометр %.2f м", zone_start)
            state = replace(state, phase=IvuPhase.NEAR_ZERO_ZONE, zone_entry_odometer_m=zone_start)

    if state.phase == IvuPhase.NEAR_ZERO_ZONE and state.zone_exit_odometer_m is None:
        zone_end = state.zone_entry_odometer_m + effective_payload(state, config).zone_length_m
        if vehicle.odometer_m >= zone_end:
            logger.info("Ограничение снято, одометр %.2f м", zone_end)
            state = replace(state, zone_exit_odometer_m=zone_end)
    return state


def active_speed_limit(state: IvuState, vehicle: VehicleState, friction: FrictionModel,
                       config: IvuConfig) -> float:
    """Текущая установка ограничителя скорости, м/с."""
    max_legal = config.max_legal_speed_mps
    if state.phase not in (IvuPhase.LIMITING, IvuPhase.NEAR_ZERO_ZONE):
        return max_legal

    payload = effective_payload(state, config)
    bump = kmh_to_mps(payload.bump_speed_kmh)

    if state.phase == IvuPhase.LIMITING:
        s = max(0.0, vehicle.odometer_m - state.trigger_odometer_m)
        profile = speed_at_distance_mps(state.u_at_trigger_mps, friction, s)
        return min(max_legal, max(bump, profile))

    if vehicle.odometer_m - state.zone_entry_odometer_m >= payload.zone_length_m:
        return max_legal
    return bump
