"""Утилиты приложения."""

from .formatters import (
    format_linkbudget_csv,
    format_stopdist_report,
    format_summary,
    format_sweep_csv,
    format_timing_csv,
)

__all__ = [
    'format_linkbudget_csv',
    'format_stopdist_report',
    'format_summary',
    'format_sweep_csv',
    'format_timing_csv',
]
