"""Core модули приложения."""

from .beacon import BeaconPayload, RsuConfig, decode_frame, encode_frame
from .config import RsuConfigStore
from .ivu import IvuConfig, IvuPhase, IvuState
from .scenario import Scenario, load_scenario
from .simengine import SimulationResult, run, simulate

__all__ = [
    'BeaconPayload',
    'RsuConfig',
    'decode_frame',
    'encode_frame',
    'RsuConfigStore',
    'IvuConfig',
    'IvuPhase',
    'IvuState',
    'Scenario',
    'load_scenario',
    'SimulationResult',
    'run',
    'simulate',
]
