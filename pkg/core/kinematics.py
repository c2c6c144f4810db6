"""
Продольная динамика автомобиля.

Тормозной путь s = u²/(2μg), профиль скорости v = √(u² − 2gμs),
время до RSU и шаг интегрирования состояния под ограничителем скорости.
"""

import math
from dataclasses import dataclass, replace
from typing import List, Tuple

from .errors import DomainError


KMH_PER_MPS = 3.6


def kmh_to_mps(speed_kmh: float) -> float:
    return speed_kmh / KMH_PER_MPS


def mps_to_kmh(speed_mps: float) -> float:
    return speed_mps * KMH_PER_MPS


@dataclass(frozen=True)
class FrictionModel:
    """
    Коэффициент трения и «комфортное» замедление.

    Эффективное замедление при торможении равно mu·g (7 м/с² при 0.7 и 10).
    accel_cap_mps2 — предел разгона после снятия ограничения.
    """

    mu: float = 0.7
    g_decel_mps2: float = 10.0
    accel_cap_mps2: float = 2.0

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise DomainError(f"mu должен быть в (0, 1], получено {self.mu}")
        if not self.g_decel_mps2 > 0:
            raise DomainError("g_decel_mps2 должно быть > 0")
        if not self.accel_cap_mps2 > 0:
            raise DomainError("accel_cap_mps2 должно быть > 0")

    @property
    def braking_mps2(self) -> float:
        return self.mu * self.g_decel_mps2


@dataclass(frozen=True)
class VehicleState:
    """Состояние автомобиля на дороге с односторонним движением."""

    position_m: float = 0.0
    speed_mps: float = 0.0
    odometer_m: float = 0.0
    desired_speed_mps: float = 0.0

    def __post_init__(self):
        if self.speed_mps < 0:
            raise DomainError("скорость не может быть отрицательной")
        if self.odometer_m < 0:
            raise DomainError("показание одометра не может быть отрицательным")


def stopping_distance_m(u_mps: float, friction: FrictionModel) -> float:
    """Тормозной путь до полной остановки, м."""
    if u_mps < 0:
        raise DomainError("начальная скорость не может быть отрицательной")
    return u_mps * u_mps / (2.0 * friction.braking_mps2)


def speed_at_distance_mps(u_mps: float, friction: FrictionModel, s_m: float) -> float:
    """Скорость после s_m метров торможения; после точки остановки — 0."""
    if s_m < 0:
        raise DomainError("пройденное расстояние не может быть отрицательным")
    return math.sqrt(max(0.0, u_mps * u_mps - 2.0 * friction.braking_mps2 * s_m))


def time_to_rsu_s(speed_kmh: float, range_m: float) -> float:
    """Время от первого приёма сигнала до RSU при постоянной скорости."""
    if not speed_kmh > 0:
        raise DomainError("скорость должна быть > 0")
    if range_m < 0:
        raise DomainError("дальность не может быть отрицательной")
    return range_m / kmh_to_mps(speed_kmh)


def time_to_speed_s(u_mps: float, v_mps: float, friction: FrictionModel) -> float:
    """Время торможения с u до v при полном замедлении mu·g."""
    if v_mps > u_mps:
        return 0.0
    return (u_mps - v_mps) / friction.braking_mps2


def deceleration_profile(u_mps: float, friction: FrictionModel,
                         step_m: float = 1.0) -> List[Tuple[float, float]]:
    """
    Профиль скорости по расстоянию с заданным шагом.

    Returns:
        Пары (s, v) от 0 до тормозного пути включительно; пусто при u = 0
    """
    if not step_m > 0:
        raise DomainError("шаг профиля должен быть > 0")
    stop = stopping_distance_m(u_mps, friction)
    if stop == 0:
        return []
    profile = []
    n = 0
    while n * step_m < stop:
        s = n * step_m
        profile.append((s, speed_at_distance_mps(u_mps, friction, s)))
        n += 1
    profile.append((stop, 0.0))
    return profile


def step_vehicle(state: VehicleState, active_limit_mps: float, friction: FrictionModel,
                 dt_s: float) -> VehicleState:
    """
    Один шаг интегрирования.

    Скорость стремится к min(желаемая, ограничение): торможение не быстрее
    mu·g, разгон не быстрее accel_cap. Путь — по формуле трапеций.
    """
    if not dt_s > 0:
        raise DomainError("шаг интегрирования должен быть > 0")
    target = max(0.0, min(state.desired_speed_mps, active_limit_mps))
    speed = state.speed_mps
    if target < speed:
        new_speed = max(target, speed - friction.braking_mps2 * dt_s)
    else:
        new_speed = min(target, speed + friction.accel_cap_mps2 * dt_s)
    advance = 0.5 * (speed + new_speed) * dt_s
    return replace(
        state,
        speed_mps=new_speed,
        position_m=state.position_m + advance,
        odometer_m=state.odometer_m + advance,
    )
