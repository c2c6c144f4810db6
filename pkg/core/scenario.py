"""
Сценарий моделирования и его загрузка из текстового документа.

Формат документа — строки `ключ = значение`, комментарии начинаются с `#`,
ключи разбиты по модулям (`radio.tx_power_dbm`, `friction.mu`, ...).
Полный перечень ключей в docs/scenario.md. Неизвестный ключ считается ошибкой.

Незаданные ключи берут значения по умолчанию (параметры из таблицы
моделирования, μ = 0.7, g = 10, порог −48 дБм, маяк 10 Гц, шаг 10 мс).
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .beacon import BeaconPayload, MAX_BUMP_SPEED_KMH, MAX_ZONE_LENGTH_M, RsuChange, RsuConfig
from .errors import ScenarioParseError, ScenarioValidationError
from .ivu import IvuConfig
from .kinematics import FrictionModel, VehicleState, kmh_to_mps, time_to_rsu_s
from .propagation import RadioLinkParams, ShadowingModel


# Ключ -> (тип, значение по умолчанию). None: значение вычисляется из других ключей.
SCENARIO_KEYS: Dict[str, Tuple[type, Optional[object]]] = {
    "radio.tx_power_dbm": (float, 10.0),
    "radio.tx_gain_dbi": (float, 15.0),
    "radio.tx_loss_db": (float, 5.0),
    "radio.misc_loss_db": (float, 5.0),
    "radio.rx_gain_dbi": (float, 8.0),
    "radio.rx_loss_db": (float, 5.0),
    "radio.rx_sensitivity_dbm": (float, -90.0),
    "radio.frequency_hz": (float, 2.4e9),
    "friction.mu": (float, 0.7),
    "friction.g_decel_mps2": (float, 10.0),
    "friction.accel_cap_mps2": (float, 2.0),
    "rsu.enabled": (bool, True),
    "rsu.beacon_interval_s": (float, 0.1),
    "rsu.bump_speed_kmh": (int, 6),
    "rsu.zone_length_m": (int, 20),
    "rsu.position_m": (float, 400.0),
    "ivu.trigger_rssi_dbm": (float, -48.0),
    "ivu.acquisition_s": (float, 10.0),
    "ivu.max_legal_speed_kmh": (float, 120.0),
    "ivu.fallback_speed_kmh": (int, 6),
    "ivu.fallback_zone_m": (int, 20),
    "ivu.trend_hysteresis_db": (float, 1.0),
    "ivu.filter_order": (int, 2),
    "shadowing.sigma_db": (float, 3.0),
    "shadowing.seed": (int, 0),
    "channel.loss_probability": (float, 0.0),
    "channel.corruption_probability": (float, 0.0),
    "vehicle.initial_position_m": (float, 0.0),
    "vehicle.initial_speed_kmh": (float, 120.0),
    "vehicle.desired_speed_kmh": (float, None),
    "scenario.bump_site_m": (float, None),
    "sim.dt_s": (float, 0.01),
    "sim.duration_s": (float, 25.0),
}

# Плановые изменения RSU: rsu.change.<n>.<поле>
CHANGE_FIELDS: Dict[str, type] = {
    "at_s": float,
    "enabled": bool,
    "bump_speed_kmh": int,
    "zone_length_m": int,
    "beacon_interval_s": float,
}
_CHANGE_KEY = re.compile(r"^rsu\.change\.(\d+)\.([a-z_]+)$")

# Расстояние от RSU до начала зоны малой скорости в каноническом сценарии
CANONICAL_RSU_TO_BUMP_M = 80.0

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class Scenario:
    """Полностью проверенный сценарий одного прогона."""

    radio: RadioLinkParams
    friction: FrictionModel
    rsu: RsuConfig
    ivu_config: IvuConfig
    shadowing: ShadowingModel
    vehicle_initial: VehicleState
    bump_site_m: float
    dt_s: float
    duration_s: float
    loss_probability: float = 0.0
    corruption_probability: float = 0.0
    rsu_changes: Tuple[RsuChange, ...] = ()
    values: Dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def approach_time_s(self) -> float:
        """Время от старта до RSU при начальной скорости (как в таблице времени подхода)."""
        distance = self.rsu.rsu_position_m - self.vehicle_initial.position_m
        return time_to_rsu_s(self.vehicle_initial.speed_mps * 3.6, distance)

    @property
    def rsu_to_bump_m(self) -> float:
        return self.bump_site_m - self.rsu.rsu_position_m


def parse_document(text: str) -> Dict[str, str]:
    """
    Разбирает документ в словарь ключ -> строковое значение.

    Raises:
        ScenarioParseError: синтаксис, повтор ключа, неизвестный ключ
    """
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError("ожидается 'ключ = значение'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ScenarioParseError("пустой ключ", line=lineno)
        if not value:
            raise ScenarioParseError("пустое значение", line=lineno, key=key)
        if not is_known_key(key):
            raise ScenarioParseError("неизвестный ключ", line=lineno, key=key)
        if key in values:
            raise ScenarioParseError("ключ задан повторно", line=lineno, key=key)
        _convert(key, value, lineno)
        values[key] = value
    return values


def is_known_key(key: str) -> bool:
    if key in SCENARIO_KEYS:
        return True
    match = _CHANGE_KEY.match(key)
    return bool(match) and match.group(2) in CHANGE_FIELDS


def _key_type(key: str) -> type:
    if key in SCENARIO_KEYS:
        return SCENARIO_KEYS[key][0]
    return CHANGE_FIELDS[_CHANGE_KEY.match(key).group(2)]


def _convert(key: str, value: str, lineno: Optional[int] = None):
    kind = _key_type(key)
    if kind is bool:
        lowered = value.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ScenarioParseError(f"ожидается логическое значение, получено '{value}'", lineno, key)
    try:
        converted = kind(value)
    except ValueError:
        name = "целое число" if kind is int else "число"
        raise ScenarioParseError(f"ожидается {name}, получено '{value}'", lineno, key) from None
    if kind is float and not math.isfinite(converted):
        raise ScenarioParseError(f"значение должно быть конечным, получено '{value}'", lineno, key)
    return converted


def _typed(values: Dict[str, str]) -> Dict[str, object]:
    typed = {key: default for key, (_, default) in SCENARIO_KEYS.items()}
    for key, value in values.items():
        if key in SCENARIO_KEYS:
            typed[key] = _convert(key, value)
    if typed["vehicle.desired_speed_kmh"] is None:
        typed["vehicle.desired_speed_kmh"] = typed["vehicle.initial_speed_kmh"]
    if typed["scenario.bump_site_m"] is None:
        typed["scenario.bump_site_m"] = typed["rsu.position_m"] + CANONICAL_RSU_TO_BUMP_M
    return typed


def _changes(values: Dict[str, str]) -> Tuple[RsuChange, ...]:
    grouped: Dict[int, Dict[str, object]] = {}
    for key, value in values.items():
        match = _CHANGE_KEY.match(key)
        if match:
            grouped.setdefault(int(match.group(1)), {})[match.group(2)] = _convert(key, value)
    changes = []
    for number in sorted(grouped):
        fields = grouped[number]
        if "at_s" not in fields:
            raise ScenarioValidationError(
                f"rsu.change.{number}.at_s", "для планового изменения не задано время"
            )
        changes.append(RsuChange(**fields))
    return tuple(sorted(changes, key=lambda c: c.at_s))


# (правило, проверка, сообщение)
_RULES: List[Tuple[str, Callable[[Dict[str, object]], bool], str]] = [
    ("radio.frequency_hz > 0", lambda v: v["radio.frequency_hz"] > 0, "частота должна быть положительной"),
    ("radio losses >= 0",
     lambda v: min(v["radio.tx_loss_db"], v["radio.misc_loss_db"], v["radio.rx_loss_db"]) >= 0,
     "потери не могут быть отрицательными"),
    ("radio.rx_sensitivity_dbm < radio.tx_power_dbm",
     lambda v: v["radio.rx_sensitivity_dbm"] < v["radio.tx_power_dbm"],
     "чувствительность должна быть ниже мощности передатчика"),
    ("0 < friction.mu <= 1", lambda v: 0 < v["friction.mu"] <= 1, "коэффициент трения вне (0, 1]"),
    ("friction.g_decel_mps2 > 0", lambda v: v["friction.g_decel_mps2"] > 0, "замедление должно быть положительным"),
    ("friction.accel_cap_mps2 > 0", lambda v: v["friction.accel_cap_mps2"] > 0, "предел разгона должен быть положительным"),
    ("rsu.beacon_interval_s > 0", lambda v: v["rsu.beacon_interval_s"] > 0, "период маяка должен быть положительным"),
    (f"0 < rsu.bump_speed_kmh <= {MAX_BUMP_SPEED_KMH}",
     lambda v: 0 < v["rsu.bump_speed_kmh"] <= MAX_BUMP_SPEED_KMH, "скорость в зоне вне допустимого диапазона"),
    (f"0 < rsu.zone_length_m <= {MAX_ZONE_LENGTH_M}",
     lambda v: 0 < v["rsu.zone_length_m"] <= MAX_ZONE_LENGTH_M, "длина зоны вне допустимого диапазона"),
    ("ivu.trigger_rssi_dbm < 0", lambda v: v["ivu.trigger_rssi_dbm"] < 0, "порог срабатывания должен быть отрицательным"),
    ("ivu.acquisition_s > 0", lambda v: v["ivu.acquisition_s"] > 0, "длительность сбора RSSI должна быть положительной"),
    (f"0 < ivu.fallback_speed_kmh <= {MAX_BUMP_SPEED_KMH}",
     lambda v: 0 < v["ivu.fallback_speed_kmh"] <= MAX_BUMP_SPEED_KMH, "резервная скорость вне допустимого диапазона"),
    ("ivu.fallback_zone_m > 0", lambda v: v["ivu.fallback_zone_m"] > 0, "резервная длина зоны должна быть положительной"),
    ("ivu.max_legal_speed_kmh >= ivu.fallback_speed_kmh",
     lambda v: v["ivu.max_legal_speed_kmh"] >= v["ivu.fallback_speed_kmh"], "предельная скорость меньше скорости в зоне"),
    ("ivu.trend_hysteresis_db >= 0", lambda v: v["ivu.trend_hysteresis_db"] >= 0, "гистерезис не может быть отрицательным"),
    ("ivu.filter_order >= 0", lambda v: v["ivu.filter_order"] >= 0, "порядок фильтра не может быть отрицательным"),
    ("shadowing.sigma_db >= 0", lambda v: v["shadowing.sigma_db"] >= 0, "СКО затенения не может быть отрицательным"),
    ("shadowing.seed >= 0", lambda v: v["shadowing.seed"] >= 0, "seed должен быть неотрицательным"),
    ("0 <= channel.loss_probability <= 1",
     lambda v: 0 <= v["channel.loss_probability"] <= 1, "вероятность потери вне [0, 1]"),
    ("0 <= channel.corruption_probability <= 1",
     lambda v: 0 <= v["channel.corruption_probability"] <= 1, "вероятность искажения вне [0, 1]"),
    ("vehicle.initial_speed_kmh >= 0", lambda v: v["vehicle.initial_speed_kmh"] >= 0, "начальная скорость отрицательная"),
    ("vehicle.desired_speed_kmh >= 0", lambda v: v["vehicle.desired_speed_kmh"] >= 0, "желаемая скорость отрицательная"),
    ("vehicle starts before the RSU",
     lambda v: v["vehicle.initial_position_m"] < v["rsu.position_m"], "автомобиль должен стартовать до RSU"),
    ("scenario.bump_site_m > rsu.position_m",
     lambda v: v["scenario.bump_site_m"] > v["rsu.position_m"], "зона малой скорости должна быть после RSU"),
    ("sim.dt_s > 0", lambda v: v["sim.dt_s"] > 0, "шаг интегрирования должен быть положительным"),
    ("sim.duration_s > 0", lambda v: v["sim.duration_s"] > 0, "длительность прогона должна быть положительной"),
]


def build_scenario(values: Dict[str, str]) -> Scenario:
    """
    Строит сценарий из словаря строковых значений.

    Raises:
        ScenarioParseError, ScenarioValidationError
    """
    for key in values:
        if not is_known_key(key):
            raise ScenarioParseError("неизвестный ключ", key=key)
    v = _typed(values)
    for rule, check, message in _RULES:
        if not check(v):
            raise ScenarioValidationError(rule, message)

    changes = _changes(values)
    for change in changes:
        if change.bump_speed_kmh is not None and not 0 < change.bump_speed_kmh <= MAX_BUMP_SPEED_KMH:
            raise ScenarioValidationError("rsu.change.bump_speed_kmh", "скорость в зоне вне допустимого диапазона")
        if change.zone_length_m is not None and not 0 < change.zone_length_m <= MAX_ZONE_LENGTH_M:
            raise ScenarioValidationError("rsu.change.zone_length_m", "длина зоны вне допустимого диапазона")
        if change.beacon_interval_s is not None and not change.beacon_interval_s > 0:
            raise ScenarioValidationError("rsu.change.beacon_interval_s", "период маяка должен быть положительным")

    radio = RadioLinkParams(
        tx_power_dbm=v["radio.tx_power_dbm"],
        tx_gain_dbi=v["radio.tx_gain_dbi"],
        tx_loss_db=v["radio.tx_loss_db"],
        misc_loss_db=v["radio.misc_loss_db"],
        rx_gain_dbi=v["radio.rx_gain_dbi"],
        rx_loss_db=v["radio.rx_loss_db"],
        rx_sensitivity_dbm=v["radio.rx_sensitivity_dbm"],
        frequency_hz=v["radio.frequency_hz"],
    )
    initial_speed = kmh_to_mps(v["vehicle.initial_speed_kmh"])
    return Scenario(
        radio=radio,
        friction=FrictionModel(
            mu=v["friction.mu"],
            g_decel_mps2=v["friction.g_decel_mps2"],
            accel_cap_mps2=v["friction.accel_cap_mps2"],
        ),
        rsu=RsuConfig(
            enabled=v["rsu.enabled"],
            beacon_interval_s=v["rsu.beacon_interval_s"],
            payload=BeaconPayload(v["rsu.bump_speed_kmh"], v["rsu.zone_length_m"]),
            radio=radio,
            rsu_position_m=v["rsu.position_m"],
        ),
        ivu_config=IvuConfig(
            trigger_rssi_dbm=v["ivu.trigger_rssi_dbm"],
            acquisition_s=v["ivu.acquisition_s"],
            max_legal_speed_kmh=v["ivu.max_legal_speed_kmh"],
            fallback_speed_kmh=v["ivu.fallback_speed_kmh"],
            fallback_zone_m=v["ivu.fallback_zone_m"],
            trend_hysteresis_db=v["ivu.trend_hysteresis_db"],
            filter_order=v["ivu.filter_order"],
        ),
        shadowing=ShadowingModel(sigma_db=v["shadowing.sigma_db"], seed=v["shadowing.seed"]),
        vehicle_initial=VehicleState(
            position_m=v["vehicle.initial_position_m"],
            speed_mps=initial_speed,
            odometer_m=0.0,
            desired_speed_mps=kmh_to_mps(v["vehicle.desired_speed_kmh"]),
        ),
        bump_site_m=v["scenario.bump_site_m"],
        dt_s=v["sim.dt_s"],
        duration_s=v["sim.duration_s"],
        loss_probability=v["channel.loss_probability"],
        corruption_probability=v["channel.corruption_probability"],
        rsu_changes=changes,
        values=dict(values),
    )


def load_scenario(text: str) -> Scenario:
    """Загружает и проверяет сценарий из текста документа."""
    return build_scenario(parse_document(text))


def with_override(scenario: Scenario, key: str, value) -> Scenario:
    """Копия сценария с одним заменённым ключом."""
    if not is_known_key(key):
        raise ScenarioParseError("неизвестный ключ", key=key)
    values = dict(scenario.values)
    values[key] = str(value)
    return build_scenario(values)
