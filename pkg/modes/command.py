"""
Командный режим работы приложения.

Подкоманды:
- linkbudget — бюджет линии по расстоянию (CSV)
- stopdist — тормозной путь и профиль скорости
- timing — время от первого приёма сигнала до RSU
- simulate — прогон сценария: трасса CSV и сводка
- sweep — перебор значения одного ключа сценария

Коды выхода: 0 — успех, 1 — ошибка использования, 2 — ошибка сценария,
3 — проверка скорости в зоне не пройдена.
"""

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import httpx
import numpy as np

from core.config import RsuConfigStore, rsu_settings_from_dict
from core.errors import DomainError, ScenarioError, ScenarioParseError, SpeedBumpError
from core.kinematics import FrictionModel, deceleration_profile, kmh_to_mps, stopping_distance_m, time_to_rsu_s
from core.propagation import (
    RadioLinkParams,
    ShadowingModel,
    fspl_db,
    link_margin_db,
    received_power_dbm,
    rssi_trace,
)
from core.scenario import Scenario, build_scenario, is_known_key, load_scenario, with_override
from core.simengine import RunSummary, simulate, write_trace_csv
from utils.formatters import (
    format_linkbudget_csv,
    format_stopdist_report,
    format_summary,
    format_sweep_csv,
    format_timing_csv,
)
from utils.settings import get_sweep_workers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2
EXIT_ACCEPTANCE = 3

# Сценарий для simulate и sweep без явного файла
DEFAULT_SCENARIO_PATH = Path(__file__).resolve().parent.parent / "scenarios" / "canonical.scn"


class UsageError(Exception):
    """Недопустимые значения аргументов командной строки."""


def run_command_mode(args) -> int:
    """
    Запускает командный режим.

    Args:
        args: Аргументы командной строки

    Returns:
        Код выхода
    """
    handler = CommandHandler(args)
    try:
        return handler.run()
    except UsageError as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as e:
        print(f"Ошибка сценария: {e}", file=sys.stderr)
        return EXIT_SCENARIO


class CommandHandler:
    """Обработчик командного режима."""

    def __init__(self, args):
        self.args = args

    def run(self) -> int:
        """Выполняет подкоманду."""
        handlers = {
            "linkbudget": self.handle_linkbudget,
            "stopdist": self.handle_stopdist,
            "timing": self.handle_timing,
            "simulate": self.handle_simulate,
            "sweep": self.handle_sweep,
        }
        return handlers[self.args.command]()

    # ==================== Вывод ====================

    def _emit(self, text: str) -> None:
        """Пишет результат в файл --output или в stdout."""
        output = getattr(self.args, "output", None)
        if output:
            Path(output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)

    def _note(self, text: str) -> None:
        """Служебная строка: в stdout, если результат ушёл в файл, иначе в stderr."""
        stream = sys.stdout if getattr(self.args, "output", None) else sys.stderr
        print(text, file=stream)

    # ==================== linkbudget ====================

    def _radio(self) -> RadioLinkParams:
        a = self.args
        base = RadioLinkParams()
        overrides = {
            "tx_power_dbm": a.tx_power,
            "tx_gain_dbi": a.tx_gain,
            "tx_loss_db": a.tx_loss,
            "misc_loss_db": a.misc_loss,
            "rx_gain_dbi": a.rx_gain,
            "rx_loss_db": a.rx_loss,
            "rx_sensitivity_dbm": a.sensitivity,
            "frequency_hz": a.frequency,
        }
        try:
            return replace(base, **{k: v for k, v in overrides.items() if v is not None})
        except DomainError as e:
            raise UsageError(str(e)) from e

    def handle_linkbudget(self) -> int:
        """Бюджет линии: FSPL, мощность на входе и запас по линии по расстоянию."""
        a = self.args
        if not a.start > 0:
            raise UsageError("--from должно быть > 0")
        if not a.step > 0:
            raise UsageError("--step должно быть > 0")
        if a.to < a.start:
            raise UsageError("--to должно быть не меньше --from")
        if a.sigma is not None and a.sigma < 0:
            raise UsageError("--sigma не может быть отрицательной")
        if a.seed < 0:
            raise UsageError("--seed должен быть неотрицательным")

        radio = self._radio()
        shadowing = ShadowingModel(sigma_db=a.sigma, seed=a.seed) if a.sigma is not None else None
        count = int((a.to - a.start) / a.step + 1e-9) + 1
        distances = [a.start + i * a.step for i in range(count)]
        rows = [
            [d, fspl_db(d, radio.frequency_hz), received_power_dbm(radio, d), link_margin_db(radio, d)]
            for d in distances
        ]
        if shadowing is not None:
            for row, sample in zip(rows, rssi_trace(radio, distances, shadowing)):
                row.append(sample)
        self._emit(format_linkbudget_csv(rows, with_sample=shadowing is not None))
        return EXIT_OK

    # ==================== stopdist ====================

    def handle_stopdist(self) -> int:
        """Тормозной путь и профиль скорости с шагом 1 м."""
        a = self.args
        if a.speed < 0:
            raise UsageError("--speed не может быть отрицательной")
        try:
            friction = FrictionModel(mu=a.mu, g_decel_mps2=a.g)
            u = kmh_to_mps(a.speed)
            distance = stopping_distance_m(u, friction)
            profile = deceleration_profile(u, friction, step_m=a.step)
        except DomainError as e:
            raise UsageError(str(e)) from e
        self._emit(format_stopdist_report(a.speed, distance, profile))
        return EXIT_OK

    # ==================== timing ====================

    def handle_timing(self) -> int:
        """Время подхода к RSU для списка скоростей."""
        a = self.args
        speeds = _parse_values(a.speeds)
        try:
            rows = [(float(s), float(a.range), time_to_rsu_s(float(s), a.range)) for s in speeds]
        except (DomainError, ValueError) as e:
            raise UsageError(str(e)) from e
        self._emit(format_timing_csv(rows))
        return EXIT_OK

    # ==================== simulate ====================

    def _load_scenario(self, path: Optional[str]) -> Scenario:
        if path is None:
            path = DEFAULT_SCENARIO_PATH
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioParseError(f"не удалось прочитать файл сценария: {e}") from e
        return load_scenario(text)

    def _apply_gateway(self, scenario: Scenario) -> Scenario:
        """Настройки RSU из файла шлюза (--rsu-config) или работающего шлюза (--rsu-url)."""
        a = self.args
        try:
            if a.rsu_config:
                return replace(scenario, rsu=RsuConfigStore(a.rsu_config).apply_to(scenario.rsu))
            if a.rsu_url:
                response = httpx.get(f"{a.rsu_url.rstrip('/')}/rsu", timeout=5.0)
                response.raise_for_status()
                return replace(scenario, rsu=rsu_settings_from_dict(scenario.rsu, response.json()))
        except httpx.HTTPError as e:
            raise ScenarioParseError(f"шлюз недоступен: {e}") from e
        except SpeedBumpError as e:
            raise ScenarioParseError(f"недопустимые настройки шлюза: {e}") from e
        return scenario

    def handle_simulate(self) -> int:
        """Прогон сценария: трасса в CSV, сводка одной строкой."""
        a = self.args
        scenario = self._load_scenario(a.scenario)
        if a.seed is not None:
            if a.seed < 0:
                raise UsageError("--seed должен быть неотрицательным")
            scenario = with_override(scenario, "shadowing.seed", a.seed)
        scenario = self._apply_gateway(scenario)

        result = simulate(scenario)
        self._emit(write_trace_csv(result.trace))
        self._note(format_summary(result.summary))
        return EXIT_OK if result.summary.passed else EXIT_ACCEPTANCE

    # ==================== sweep ====================

    def handle_sweep(self) -> int:
        """Перебор значений одного ключа сценария."""
        a = self.args
        if not is_known_key(a.param):
            raise UsageError(f"неизвестный ключ сценария: {a.param}")
        if a.seeds < 1:
            raise UsageError("--seeds должно быть не меньше 1")
        values = _parse_values(a.values)
        base = self._load_scenario(a.scenario)
        seeds = 1 if a.param == "shadowing.seed" else a.seeds
        first_seed = a.seed if a.seed is not None else base.shadowing.seed

        # проверка значений до запуска прогонов
        for value in values:
            with_override(base, a.param, value)

        tasks = [
            (base.values, a.param, value, first_seed + i)
            for value in values
            for i in range(seeds)
        ]
        workers = get_sweep_workers()
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                summaries = list(pool.map(_sweep_point, *zip(*tasks)))
        else:
            summaries = [_sweep_point(*task) for task in tasks]

        by_value: Dict[str, List[RunSummary]] = {}
        for (_, _, value, _), summary in zip(tasks, summaries):
            by_value.setdefault(value, []).append(summary)

        rows = [_sweep_row(value, by_value[value]) for value in _sorted_values(values)]
        self._emit(format_sweep_csv(rows))
        return EXIT_OK


def _parse_values(text: str) -> List[str]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise UsageError("список значений пуст")
    return values


def _sorted_values(values: Sequence[str]) -> List[str]:
    try:
        return sorted(values, key=float)
    except ValueError:
        return list(values)


def _sweep_point(values: Dict[str, str], key: str, value: str, seed: int) -> RunSummary:
    """Один прогон перебора (функция уровня модуля для ProcessPoolExecutor)."""
    overridden = {**values, key: value}
    if key != "shadowing.seed":
        overridden["shadowing.seed"] = str(seed)
    return simulate(build_scenario(overridden)).summary


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def _sweep_row(value: str, summaries: List[RunSummary]) -> list:
    triggered = [s for s in summaries if s.triggered]
    speeds = [s.bump_site_speed_mps for s in triggered if s.bump_site_speed_mps is not None]
    distances = [s.trigger_distance_m for s in triggered]
    errors = [s.anchor_error_m for s in triggered]
    return [
        value,
        len(summaries),
        _mean(speeds),
        _mean(distances),
        _mean(errors),
        float(np.std(distances)) if distances else None,
    ]
