"""
Модель радиоканала RSU → IVU.

Замкнутые формулы:
- потери в свободном пространстве (FSPL)
- бюджет линии (мощность на входе приёмника)
- запас по линии
- дальность связи и обратное преобразование RSSI → расстояние
- логнормальное затенение с детерминированной индексируемой последовательностью

Все величины в дБ/дБм, линейные единицы не хранятся.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from .errors import DomainError, NoCoverageError, OutOfModelError


SPEED_OF_LIGHT_MPS = 299792458.0

# 20·log10(4π/c), постоянная часть FSPL
_FSPL_CONSTANT_DB = 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT_MPS)


@dataclass(frozen=True)
class RadioLinkParams:
    """Параметры радиолинии (по умолчанию: типовая линия RSU 2.4 ГГц)."""

    tx_power_dbm: float = 10.0
    tx_gain_dbi: float = 15.0
    tx_loss_db: float = 5.0
    misc_loss_db: float = 5.0
    rx_gain_dbi: float = 8.0
    rx_loss_db: float = 5.0
    rx_sensitivity_dbm: float = -90.0
    frequency_hz: float = 2.4e9

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise DomainError(f"frequency_hz должна быть > 0, получено {self.frequency_hz}")
        for name in ("tx_loss_db", "misc_loss_db", "rx_loss_db"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} не может быть отрицательным")
        if not self.rx_sensitivity_dbm < self.tx_power_dbm:
            raise DomainError("rx_sensitivity_dbm должна быть меньше tx_power_dbm")

    @property
    def budget_db(self) -> float:
        """Сумма усилений и потерь без учёта FSPL."""
        return (
            self.tx_power_dbm
            + self.tx_gain_dbi
            - self.tx_loss_db
            - self.misc_loss_db
            + self.rx_gain_dbi
            - self.rx_loss_db
        )


DEFAULT_RADIO = RadioLinkParams()


@dataclass(frozen=True)
class ShadowingModel:
    """Логнормальное затенение: нормальный шум в дБ с фиксированным seed."""

    sigma_db: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_db < 0:
            raise DomainError("sigma_db не может быть отрицательной")
        if self.seed < 0:
            raise DomainError("seed должен быть неотрицательным")


def fspl_db(distance_m: float, frequency_hz: float) -> float:
    """
    Потери в свободном пространстве.

    Args:
        distance_m: Расстояние, м (> 0)
        frequency_hz: Частота, Гц (> 0)

    Returns:
        Потери, дБ
    """
    if not distance_m > 0:
        raise DomainError(f"расстояние должно быть > 0, получено {distance_m}")
    if not frequency_hz > 0:
        raise DomainError(f"частота должна быть > 0, получено {frequency_hz}")
    return 20.0 * math.log10(distance_m) + 20.0 * math.log10(frequency_hz) + _FSPL_CONSTANT_DB


def received_power_dbm(params: RadioLinkParams, distance_m: float) -> float:
    """Мощность на входе приёмника, дБм."""
    return params.budget_db - fspl_db(distance_m, params.frequency_hz)


def link_margin_db(params: RadioLinkParams, distance_m: float) -> float:
    """Запас по линии относительно чувствительности приёмника, дБ."""
    return received_power_dbm(params, distance_m) - params.rx_sensitivity_dbm


def max_range_m(params: RadioLinkParams) -> float:
    """
    Дальность, на которой запас по линии равен нулю.

    Решается в замкнутом виде: запас убывает ровно на 20·log10(d)
    относительно значения на 1 м.
    """
    margin_at_1m = link_margin_db(params, 1.0)
    if margin_at_1m < 0:
        raise NoCoverageError(f"запас по линии на 1 м отрицательный: {margin_at_1m:.2f} дБ")
    return 10.0 ** (margin_at_1m / 20.0)


def bisect_range_m(params: RadioLinkParams, lo: float = 1.0, hi: float = 1e6,
                   tol: float = 1e-6) -> float:
    """Дальность связи методом бисекции по link_margin_db (независимая проверка)."""
    if link_margin_db(params, lo) < 0:
        raise NoCoverageError("запас по линии на нижней границе отрицательный")
    while link_margin_db(params, hi) > 0:
        hi *= 10.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if link_margin_db(params, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def distance_from_rssi(params: RadioLinkParams, rssi_dbm: float) -> float:
    """
    Оценка расстояния до RSU по уровню сигнала (обращение бюджета линии).

    Raises:
        OutOfModelError: RSSI выше мощности, предсказанной на 1 м
    """
    power_at_1m = received_power_dbm(params, 1.0)
    if rssi_dbm > power_at_1m:
        raise OutOfModelError(
            f"RSSI {rssi_dbm:.2f} дБм выше уровня на 1 м ({power_at_1m:.2f} дБм)"
        )
    return 10.0 ** ((power_at_1m - rssi_dbm) / 20.0)


def shadowing_draw(shadowing: ShadowingModel, draw_index: int, stream: int = 0) -> float:
    """
    Стандартная нормальная величина, зависящая только от (seed, draw_index, stream).

    Генератор создаётся заново для каждого индекса, поэтому последовательность
    не зависит от порядка и количества запросов.
    """
    rng = np.random.default_rng([shadowing.seed, int(draw_index), int(stream)])
    return float(rng.standard_normal())


def sample_rssi(params: RadioLinkParams, distance_m: float, shadowing: ShadowingModel,
                draw_index: int) -> float:
    """Отсчёт RSSI с логнормальным затенением."""
    power = received_power_dbm(params, distance_m)
    if shadowing.sigma_db == 0:
        return power
    return power + shadowing.sigma_db * shadowing_draw(shadowing, draw_index)


def rssi_trace(params: RadioLinkParams, distances: Iterable[float], shadowing: ShadowingModel,
               first_index: int = 0) -> List[float]:
    """Серия отсчётов RSSI для последовательности расстояний."""
    return [
        sample_rssi(params, d, shadowing, first_index + i)
        for i, d in enumerate(distances)
    ]
