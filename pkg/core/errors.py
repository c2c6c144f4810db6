"""
Иерархия исключений приложения.

Все ошибки предметной области наследуются от SpeedBumpError, чтобы CLI и
шлюз могли перехватывать их одним блоком и отображать в коды выхода / HTTP.
"""

from typing import Optional


class SpeedBumpError(Exception):
    """Базовая ошибка электронного «лежачего полицейского»."""


class DomainError(SpeedBumpError, ValueError):
    """Аргумент вне области определения функции."""


class NoCoverageError(SpeedBumpError):
    """Запас по линии отрицательный даже на расстоянии 1 м."""


class OutOfModelError(SpeedBumpError):
    """RSSI сильнее, чем модель предсказывает на 1 м."""


class InsufficientDataError(SpeedBumpError):
    """Окно RSSI ещё не накопило нужную длительность."""


class FrameEncodeError(SpeedBumpError, ValueError):
    """Полезная нагрузка не может быть закодирована."""


class FrameDecodeError(SpeedBumpError):
    """Кадр маяка не прошёл проверку. status — короткий код для трассы."""

    status = "decode_error"


class BadLengthError(FrameDecodeError):
    status = "bad_length"


class BadMagicError(FrameDecodeError):
    status = "bad_magic"


class BadCrcError(FrameDecodeError):
    status = "bad_crc"


class OutOfRangeError(FrameDecodeError):
    status = "out_of_range"


class ScenarioError(SpeedBumpError):
    """Ошибка загрузки сценария."""


class ScenarioParseError(ScenarioError):
    """Синтаксическая ошибка документа сценария."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"строка {line}")
        if key:
            where.append(f"ключ '{key}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(f"{prefix}{message}")


class ScenarioValidationError(ScenarioError):
    """Нарушено правило (инвариант) сценария. rule — имя правила."""

    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(f"нарушено правило {rule}: {message}")
