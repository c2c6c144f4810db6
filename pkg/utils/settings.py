"""
Настройки из переменных окружения (.env).

- LOG_LEVEL — уровень журнала (по умолчанию WARNING)
- SWEEP_WORKERS — число процессов для sweep (по умолчанию 1, последовательно)
- GATEWAY_CONFIG_PATH — файл настроек RSU для шлюза
- GATEWAY_HOST — адрес, на котором слушает шлюз (по умолчанию 127.0.0.1)
"""

import logging
import os
import warnings
from typing import Optional

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def get_log_level() -> int:
    """Уровень журнала из LOG_LEVEL; при неверном значении — WARNING."""
    name = (os.environ.get("LOG_LEVEL") or "").strip().upper() or "WARNING"
    if name not in _LEVELS:
        warnings.warn(
            f"Неверное значение LOG_LEVEL='{name}', используется WARNING.",
            UserWarning,
            stacklevel=2,
        )
        name = "WARNING"
    return getattr(logging, name)


def get_sweep_workers() -> int:
    """Число процессов для перебора параметров (не менее 1)."""
    value = os.environ.get("SWEEP_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        warnings.warn(
            f"Неверное значение SWEEP_WORKERS='{value}', используется 1.",
            UserWarning,
            stacklevel=2,
        )
        return 1


def get_gateway_config_path() -> Optional[str]:
    """Путь к файлу настроек RSU или None (путь по умолчанию)."""
    value = (os.environ.get("GATEWAY_CONFIG_PATH") or "").strip()
    return value or None


def get_gateway_host() -> str:
    return (os.environ.get("GATEWAY_HOST") or "").strip() or "127.0.0.1"
