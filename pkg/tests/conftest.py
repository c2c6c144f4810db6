"""Общие фикстуры тестов."""

from pathlib import Path

import pytest

from core.config import RsuConfigStore
from core.kinematics import FrictionModel
from core.propagation import DEFAULT_RADIO, RadioLinkParams
from core.scenario import Scenario, load_scenario

ROOT = Path(__file__).resolve().parent.parent
CANONICAL_PATH = ROOT / "scenarios" / "canonical.scn"


@pytest.fixture
def radio() -> RadioLinkParams:
    return DEFAULT_RADIO


@pytest.fixture
def friction() -> FrictionModel:
    return FrictionModel(mu=0.7, g_decel_mps2=10.0)


@pytest.fixture
def canonical_text() -> str:
    return CANONICAL_PATH.read_text(encoding="utf-8")


@pytest.fixture
def canonical_scenario(canonical_text) -> Scenario:
    return load_scenario(canonical_text)


@pytest.fixture
def gateway_store(tmp_path) -> RsuConfigStore:
    return RsuConfigStore(tmp_path / "rsu_config.json")
