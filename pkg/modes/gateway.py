"""
Режим локального IoT-шлюза RSU.

FastAPI сервер для удалённого управления настройками RSU: включение и
выключение системы, скорость и длина зоны, период маяков.

Эндпоинты:
- GET /health - проверка работоспособности
- GET /rsu - текущие настройки RSU
- PUT /rsu - частичное обновление настроек
- POST /rsu/enable - включить систему
- POST /rsu/disable - выключить систему
- GET /rsu/frame - кадр маяка с текущей полезной нагрузкой (hex)
"""

import logging
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field
import uvicorn

from core.beacon import MAX_BUMP_SPEED_KMH, MAX_ZONE_LENGTH_M, encode_frame, frame_hex
from core.config import RsuConfigStore
from core.errors import SpeedBumpError
from utils.settings import get_gateway_config_path

logger = logging.getLogger(__name__)

# Хранилище настроек; создаётся при первом обращении
_store: Optional[RsuConfigStore] = None


class RsuSettings(BaseModel):
    """Настройки RSU."""
    enabled: bool
    bump_speed_kmh: int
    zone_length_m: int
    beacon_interval_s: float


class RsuUpdateRequest(BaseModel):
    """Частичное обновление настроек RSU; неуказанные поля не меняются."""
    enabled: Optional[bool] = None
    bump_speed_kmh: Optional[int] = Field(default=None, ge=1, le=MAX_BUMP_SPEED_KMH)
    zone_length_m: Optional[int] = Field(default=None, ge=1, le=MAX_ZONE_LENGTH_M)
    beacon_interval_s: Optional[float] = Field(default=None, gt=0)


class FrameResponse(BaseModel):
    """Кадр маяка."""
    enabled: bool
    frame_hex: str
    length: int


class HealthResponse(BaseModel):
    """Ответ проверки здоровья."""
    status: str
    enabled: bool
    config_path: str


app = FastAPI(
    title="Electronic Speed Bump Gateway",
    description="Локальный шлюз управления настройками RSU",
    version="1.0.0",
)


def configure_store(config_path: Optional[str] = None) -> RsuConfigStore:
    """
    Задаёт файл настроек, с которым работает шлюз.

    Args:
        config_path: Путь к JSON файлу; None — путь по умолчанию
    """
    global _store
    _store = RsuConfigStore(config_path)
    logger.info("Настройки RSU: %s", _store.config_path)
    return _store


def get_store() -> RsuConfigStore:
    if _store is None:
        return configure_store(get_gateway_config_path())
    return _store


def _settings() -> RsuSettings:
    return RsuSettings(**get_store().to_dict())


@app.get("/health", response_model=HealthResponse)
async def health_check():
    """Проверка работоспособности сервера."""
    store = get_store()
    return HealthResponse(
        status="ok",
        enabled=store.is_enabled(),
        config_path=str(store.config_path),
    )


@app.get("/rsu", response_model=RsuSettings)
async def get_rsu():
    """Возвращает текущие настройки RSU."""
    return _settings()


@app.put("/rsu", response_model=RsuSettings)
async def update_rsu(request: RsuUpdateRequest):
    """
    Частично обновляет настройки RSU.

    Значения вне допустимых диапазонов отклоняются (422) до записи в файл.
    """
    changes = request.model_dump(exclude_unset=True, exclude_none=True)
    try:
        get_store().update(**changes)
    except SpeedBumpError as e:
        raise HTTPException(status_code=400, detail=str(e))
    logger.info("Настройки RSU обновлены: %s", changes)
    return _settings()


@app.post("/rsu/enable", response_model=RsuSettings)
async def enable_rsu():
    """Включает электронный «лежачий полицейский»."""
    get_store().set_enabled(True)
    return _settings()


@app.post("/rsu/disable", response_model=RsuSettings)
async def disable_rsu():
    """Выключает систему: RSU перестаёт передавать маяки."""
    get_store().set_enabled(False)
    return _settings()


@app.get("/rsu/frame", response_model=FrameResponse)
async def get_frame():
    """Кадр маяка, который RSU передаёт с текущими настройками."""
    store = get_store()
    try:
        frame = encode_frame(store.get_payload())
    except SpeedBumpError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return FrameResponse(enabled=store.is_enabled(), frame_hex=frame_hex(frame), length=len(frame))


def run_gateway_server(host: str = "127.0.0.1", port: int = 8080,
                       config_path: Optional[str] = None):
    """
    Запускает шлюз.

    Args:
        host: Адрес для прослушивания
        port: Порт для сервера
        config_path: Путь к файлу настроек RSU
    """
    store = configure_store(config_path or get_gateway_config_path())

    print("\n=== Electronic Speed Bump - RSU Gateway ===")
    print(f"Адрес: {host}:{port}")
    print(f"Настройки: {store.config_path}")
    print(f"Документация: http://{host}:{port}/docs")
    print()

    uvicorn.run(
        app,
        host=host,
        port=port,
        log_level="info"
    )
