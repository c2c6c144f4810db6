"""
Сторона RSU: формат кадра маяка и расписание передачи.

Формат кадра (5 октетов, контракт между RSU и IVU):
    [0xB5][скорость u8, км/ч][длина зоны u16, младший октет первым][crc8]

CRC-8: полином 0x07, начальное значение 0x00, без отражения и финального xor.
"""

import math
import struct
from dataclasses import dataclass, field, replace
from typing import List, Optional

from .errors import (
    BadCrcError,
    BadLengthError,
    BadMagicError,
    DomainError,
    FrameEncodeError,
    OutOfRangeError,
)
from .propagation import RadioLinkParams, DEFAULT_RADIO


FRAME_MAGIC = 0xB5
FRAME_LENGTH = 5
CRC8_POLY = 0x07
MAX_BUMP_SPEED_KMH = 12
MAX_ZONE_LENGTH_M = 0xFFFF

_BODY = struct.Struct("<BBH")


@dataclass(frozen=True)
class BeaconPayload:
    """Полезная нагрузка маяка: скорость в зоне и длина зоны."""

    bump_speed_kmh: int = 6
    zone_length_m: int = 20

    def validate(self) -> None:
        if not 0 < self.bump_speed_kmh <= MAX_BUMP_SPEED_KMH:
            raise FrameEncodeError(
                f"скорость в зоне должна быть в (0, {MAX_BUMP_SPEED_KMH}] км/ч, "
                f"получено {self.bump_speed_kmh}"
            )
        if not 0 < self.zone_length_m <= MAX_ZONE_LENGTH_M:
            raise FrameEncodeError(
                f"длина зоны должна быть в (0, {MAX_ZONE_LENGTH_M}] м, получено {self.zone_length_m}"
            )


FALLBACK_PAYLOAD = BeaconPayload(bump_speed_kmh=6, zone_length_m=20)


@dataclass(frozen=True)
class RsuConfig:
    """Настройки RSU на один прогон (изменения создают новое значение)."""

    enabled: bool = True
    beacon_interval_s: float = 0.1
    payload: BeaconPayload = field(default_factory=BeaconPayload)
    radio: RadioLinkParams = DEFAULT_RADIO
    rsu_position_m: float = 400.0

    def __post_init__(self):
        if not self.beacon_interval_s > 0:
            raise DomainError("beacon_interval_s должен быть > 0")
        self.payload.validate()


@dataclass(frozen=True)
class RsuChange:
    """Плановое (или удалённое) изменение настроек RSU в момент at_s."""

    at_s: float
    enabled: Optional[bool] = None
    bump_speed_kmh: Optional[int] = None
    zone_length_m: Optional[int] = None
    beacon_interval_s: Optional[float] = None


def crc8(data: bytes) -> int:
    """CRC-8/0x07 над последовательностью октетов."""
    if len(data) == 0:
        raise DomainError("CRC от пустых данных не определён")
    crc = 0x00
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 0x80:
                crc = ((crc << 1) ^ CRC8_POLY) & 0xFF
            else:
                crc = (crc << 1) & 0xFF
    return crc


def encode_frame(payload: BeaconPayload) -> bytes:
    """Кодирует полезную нагрузку в кадр из 5 октетов."""
    payload.validate()
    body = _BODY.pack(FRAME_MAGIC, payload.bump_speed_kmh, payload.zone_length_m)
    return body + bytes([crc8(body)])


def decode_frame(frame: bytes) -> BeaconPayload:
    """
    Декодирует кадр маяка.

    Raises:
        BadLengthError, BadMagicError, BadCrcError, OutOfRangeError
    """
    frame = bytes(frame)
    if len(frame) != FRAME_LENGTH:
        raise BadLengthError(f"длина кадра {len(frame)}, ожидается {FRAME_LENGTH}")
    if frame[0] != FRAME_MAGIC:
        raise BadMagicError(f"неверный заголовок 0x{frame[0]:02X}")
    if crc8(frame[:-1]) != frame[-1]:
        raise BadCrcError("контрольная сумма не совпадает")
    _, speed, zone = _BODY.unpack(frame[:-1])
    payload = BeaconPayload(bump_speed_kmh=speed, zone_length_m=zone)
    try:
        payload.validate()
    except FrameEncodeError as e:
        raise OutOfRangeError(str(e)) from e
    return payload


def frame_hex(frame: bytes) -> str:
    """Кадр в виде 'B5 06 14 00 A8'."""
    return " ".join(f"{b:02X}" for b in frame)


def _first_index(t_s: float, interval_s: float) -> int:
    # округление гасит погрешность деления вида 0.3 / 0.1 = 2.9999999999999996
    return math.ceil(round(t_s / interval_s, 9))


def beacon_indices_in_interval(config: RsuConfig, t_start_s: float, t_end_s: float) -> List[int]:
    """Номера маяков n, для которых n·interval ∈ [t_start, t_end)."""
    if t_start_s > t_end_s:
        raise DomainError("t_start_s должно быть не больше t_end_s")
    if not config.enabled:
        return []
    first = _first_index(t_start_s, config.beacon_interval_s)
    stop = _first_index(t_end_s, config.beacon_interval_s)
    return list(range(first, stop))


def beacons_in_interval(config: RsuConfig, t_start_s: float, t_end_s: float) -> List[float]:
    """Моменты передачи маяков на полуинтервале [t_start, t_end)."""
    return [
        n * config.beacon_interval_s
        for n in beacon_indices_in_interval(config, t_start_s, t_end_s)
    ]


def apply_change(config: RsuConfig, change: RsuChange) -> RsuConfig:
    """Возвращает новые настройки RSU с применённым изменением."""
    payload = config.payload
    if change.bump_speed_kmh is not None or change.zone_length_m is not None:
        payload = replace(
            payload,
            bump_speed_kmh=(
                change.bump_speed_kmh if change.bump_speed_kmh is not None
                else payload.bump_speed_kmh
            ),
            zone_length_m=(
                change.zone_length_m if change.zone_length_m is not None
                else payload.zone_length_m
            ),
        )
    return replace(
        config,
        enabled=change.enabled if change.enabled is not None else config.enabled,
        beacon_interval_s=(
            change.beacon_interval_s if change.beacon_interval_s is not None
            else config.beacon_interval_s
        ),
        payload=payload,
    )
