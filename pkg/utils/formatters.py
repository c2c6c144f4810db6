"""
Утилиты для форматирования вывода.

Весь табличный вывод — CSV (для построения графиков внешними средствами):
- бюджет линии по расстоянию
- профиль торможения
- время подхода к RSU
- перебор параметров
и однострочная сводка прогона.
"""

import csv
import io
import math
from typing import Iterable, List, Optional, Sequence

from core.kinematics import mps_to_kmh
from core.simengine import RunSummary, format_sig


def _csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_sig(v) if isinstance(v, float) or v is None else v for v in row])
    return buf.getvalue()


def format_linkbudget_csv(rows: List[Sequence[Optional[float]]], with_sample: bool = False) -> str:
    """
    Args:
        rows: (расстояние, FSPL, P_RX, запас[, отсчёт RSSI])
        with_sample: Добавлять ли столбец отсчёта с затенением
    """
    header = ["distance_m", "fspl_db", "p_rx_dbm", "margin_db"]
    if with_sample:
        header.append("rssi_sample_dbm")
    return _csv(header, rows)


def format_stopdist_report(speed_kmh: float, distance_m: float,
                           profile: List[Sequence[float]]) -> str:
    """Отчёт о тормозном пути: строки-комментарии и CSV профиля скорости."""
    lines = [
        f"# Начальная скорость: {speed_kmh:g} км/ч",
        f"# Тормозной путь: {distance_m:.2f} м (округлённо {round(distance_m, -1):.0f} м)",
    ]
    body = _csv(["s_m", "v_mps", "v_kmh"], ((s, v, mps_to_kmh(v)) for s, v in profile))
    return "\n".join(lines) + "\n" + body


def format_timing_csv(rows: List[Sequence[float]]) -> str:
    return _csv(["speed_kmh", "range_m", "time_s"], rows)


def format_sweep_csv(rows: List[Sequence[object]]) -> str:
    return _csv(
        [
            "value",
            "seeds",
            "bump_site_speed_mps",
            "trigger_distance_m",
            "trigger_error_m",
            "trigger_distance_std_m",
        ],
        rows,
    )


def _fmt(value: Optional[float], digits: int = 2) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "—"
    return f"{value:.{digits}f}"


def format_summary(summary: RunSummary) -> str:
    """Однострочная сводка прогона."""
    if not summary.triggered:
        return (
            f"no trigger: ограничение не включалось "
            f"(маяков декодировано {summary.decode_attempts - summary.decode_failures}"
            f" из {summary.decode_attempts})"
        )
    verdict = "OK" if summary.passed else "FAIL"
    payload = "payload" if summary.payload_decoded else "fallback"
    deferred = " deferred" if summary.trigger_deferred else ""
    return (
        f"{verdict}: trigger_odometer_m={_fmt(summary.trigger_odometer_m)}"
        f" trigger_distance_m={_fmt(summary.trigger_distance_m)}"
        f" bump_site_speed_mps={_fmt(summary.bump_site_speed_mps, 3)}"
        f" zone_exit_odometer_m={_fmt(summary.zone_exit_odometer_m)}"
        f" ({payload}{deferred})"
    )
