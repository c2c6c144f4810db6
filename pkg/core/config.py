"""
Хранилище настроек RSU, которыми управляет локальный IoT-шлюз.

Настройки хранятся в JSON файле (по умолчанию data/rsu_config.json) и содержат:
- enabled: включена ли система (выключение — когда зона не нужна)
- bump_speed_kmh: скорость в зоне малой скорости (1..12 км/ч)
- zone_length_m: длина зоны, на которой действует ограничение
- beacon_interval_s: период передачи маяков

Путь к файлу можно задать переменной окружения GATEWAY_CONFIG_PATH (см. .env.example).
Если изменения не вносились, действуют значения по умолчанию.
"""

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .beacon import BeaconPayload, RsuConfig
from .errors import DomainError, FrameEncodeError

logger = logging.getLogger(__name__)


class RsuConfigStore:
    """Класс для работы с сохранёнными настройками RSU."""

    DEFAULT_CONFIG = {
        "enabled": True,
        "bump_speed_kmh": 6,
        "zone_length_m": 20,
        "beacon_interval_s": 0.1,
    }

    def __init__(self, config_path: str = None):
        """
        Инициализация хранилища.

        Args:
            config_path: Путь к файлу настроек.
                        По умолчанию data/rsu_config.json в директории проекта.
        """
        if config_path is None:
            base_dir = Path(__file__).parent.parent
            data_dir = base_dir / "data"
            data_dir.mkdir(exist_ok=True)
            config_path = data_dir / "rsu_config.json"

        self.config_path = Path(config_path)
        self._config = self._load_config()

    def _load_config(self) -> dict:
        """Загружает настройки из файла, объединяя с настройками по умолчанию."""
        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    config = json.load(f)
                unknown = set(config) - set(self.DEFAULT_CONFIG)
                if unknown:
                    logger.warning("Неизвестные ключи в %s: %s", self.config_path, sorted(unknown))
                known = {k: v for k, v in config.items() if k in self.DEFAULT_CONFIG}
                return {**self.DEFAULT_CONFIG, **known}
            except (json.JSONDecodeError, IOError) as e:
                logger.error("Ошибка чтения настроек RSU: %s", e)
                return self.DEFAULT_CONFIG.copy()
        return self.DEFAULT_CONFIG.copy()

    def _save_config(self) -> bool:
        """Сохраняет настройки в файл."""
        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(self._config, f, indent=2, ensure_ascii=False)
            return True
        except IOError as e:
            logger.error("Ошибка сохранения настроек RSU: %s", e)
            return False

    def is_enabled(self) -> bool:
        return bool(self._config.get("enabled", True))

    def set_enabled(self, enabled: bool) -> None:
        """Включает или выключает электронный «лежачий полицейский»."""
        self._config["enabled"] = bool(enabled)
        self._save_config()

    def get_payload(self) -> BeaconPayload:
        """Возвращает полезную нагрузку маяка из настроек."""
        return BeaconPayload(
            bump_speed_kmh=int(self._config["bump_speed_kmh"]),
            zone_length_m=int(self._config["zone_length_m"]),
        )

    def update(self, enabled: Optional[bool] = None, bump_speed_kmh: Optional[int] = None,
               zone_length_m: Optional[int] = None,
               beacon_interval_s: Optional[float] = None) -> dict:
        """
        Частично обновляет настройки.

        Значения проверяются до записи: при ошибке файл не меняется.

        Raises:
            DomainError: недопустимое значение
        """
        candidate = dict(self._config)
        for key, value in (
            ("enabled", enabled),
            ("bump_speed_kmh", bump_speed_kmh),
            ("zone_length_m", zone_length_m),
            ("beacon_interval_s", beacon_interval_s),
        ):
            if value is not None:
                candidate[key] = value
        try:
            BeaconPayload(int(candidate["bump_speed_kmh"]), int(candidate["zone_length_m"])).validate()
        except FrameEncodeError as e:
            raise DomainError(str(e)) from e
        if not float(candidate["beacon_interval_s"]) > 0:
            raise DomainError("beacon_interval_s должен быть > 0")
        self._config = candidate
        self._save_config()
        return self.to_dict()

    def apply_to(self, rsu: RsuConfig) -> RsuConfig:
        """Настройки RSU сценария с применёнными настройками шлюза."""
        return rsu_settings_from_dict(rsu, self._config)

    def reload(self) -> None:
        """Перезагружает настройки из файла."""
        self._config = self._load_config()

    def to_dict(self) -> dict:
        """Возвращает настройки как словарь."""
        return self._config.copy()

    def __repr__(self) -> str:
        return f"RsuConfigStore({self.config_path})"


def rsu_settings_from_dict(rsu: RsuConfig, settings: dict) -> RsuConfig:
    """Применяет словарь настроек шлюза (например, ответ GET /rsu) к настройкам RSU."""
    merged = {**RsuConfigStore.DEFAULT_CONFIG, **{k: v for k, v in settings.items()
                                                 if k in RsuConfigStore.DEFAULT_CONFIG}}
    return replace(
        rsu,
        enabled=bool(merged["enabled"]),
        beacon_interval_s=float(merged["beacon_interval_s"]),
        payload=BeaconPayload(int(merged["bump_speed_kmh"]), int(merged["zone_length_m"])),
    )
