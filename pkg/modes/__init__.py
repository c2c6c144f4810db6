"""Режимы работы приложения."""

from .command import run_command_mode
from .gateway import run_gateway_server

__all__ = ['run_command_mode', 'run_gateway_server']
