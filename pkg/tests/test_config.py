"""Тесты хранилища настроек RSU и настроек окружения."""

import json
import logging

import pytest

from core.beacon import BeaconPayload, RsuConfig
from core.config import RsuConfigStore, rsu_settings_from_dict
from core.errors import DomainError
from utils.settings import get_gateway_config_path, get_gateway_host, get_log_level, get_sweep_workers


class TestRsuConfigStore:
    def test_defaults_without_file(self, gateway_store):
        assert gateway_store.to_dict() == RsuConfigStore.DEFAULT_CONFIG
        assert gateway_store.is_enabled()
        assert gateway_store.get_payload() == BeaconPayload(6, 20)

    def test_merges_with_defaults(self, tmp_path, caplog):
        path = tmp_path / "rsu.json"
        path.write_text(json.dumps({"zone_length_m": 35, "colour": "red"}), encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            store = RsuConfigStore(path)
        assert store.get_payload() == BeaconPayload(6, 35)
        assert "colour" not in store.to_dict()
        assert "colour" in caplog.text

    def test_broken_json_falls_back(self, tmp_path):
        path = tmp_path / "rsu.json"
        path.write_text("{not json", encoding="utf-8")
        assert RsuConfigStore(path).to_dict() == RsuConfigStore.DEFAULT_CONFIG

    def test_update_writes_through(self, gateway_store):
        gateway_store.update(bump_speed_kmh=8, beacon_interval_s=0.2)
        reloaded = RsuConfigStore(gateway_store.config_path)
        assert reloaded.get_payload() == BeaconPayload(8, 20)
        assert reloaded.to_dict()["beacon_interval_s"] == 0.2

    @pytest.mark.parametrize("changes", [
        {"bump_speed_kmh": 13},
        {"zone_length_m": 0},
        {"beacon_interval_s": -1.0},
    ])
    def test_invalid_update_leaves_file(self, gateway_store, changes):
        gateway_store.update(zone_length_m=25)
        with pytest.raises(DomainError):
            gateway_store.update(**changes)
        assert RsuConfigStore(gateway_store.config_path).get_payload() == BeaconPayload(6, 25)

    def test_set_enabled_and_reload(self, gateway_store):
        gateway_store.set_enabled(False)
        other = RsuConfigStore(gateway_store.config_path)
        assert not other.is_enabled()
        gateway_store.set_enabled(True)
        other.reload()
        assert other.is_enabled()

    def test_apply_to(self, gateway_store):
        gateway_store.update(enabled=False, bump_speed_kmh=10, zone_length_m=40)
        rsu = gateway_store.apply_to(RsuConfig(rsu_position_m=250.0))
        assert not rsu.enabled
        assert rsu.payload == BeaconPayload(10, 40)
        assert rsu.rsu_position_m == 250.0


def test_rsu_settings_from_dict_partial():
    rsu = rsu_settings_from_dict(RsuConfig(), {"zone_length_m": 50, "ignored": 1})
    assert rsu.payload == BeaconPayload(6, 50)
    assert rsu.enabled


class TestSettings:
    def test_log_level(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "debug")
        assert get_log_level() == logging.DEBUG
        monkeypatch.setenv("LOG_LEVEL", "loud")
        with pytest.warns(UserWarning):
            assert get_log_level() == logging.WARNING

    def test_sweep_workers(self, monkeypatch):
        monkeypatch.delenv("SWEEP_WORKERS", raising=False)
        assert get_sweep_workers() == 1
        monkeypatch.setenv("SWEEP_WORKERS", "4")
        assert get_sweep_workers() == 4
        monkeypatch.setenv("SWEEP_WORKERS", "0")
        assert get_sweep_workers() == 1
        monkeypatch.setenv("SWEEP_WORKERS", "many")
        with pytest.warns(UserWarning):
            assert get_sweep_workers() == 1

    def test_gateway(self, monkeypatch):
        monkeypatch.delenv("GATEWAY_HOST", raising=False)
        monkeypatch.delenv("GATEWAY_CONFIG_PATH", raising=False)
        assert get_gateway_host() == "127.0.0.1"
        assert get_gateway_config_path() is None
        monkeypatch.setenv("GATEWAY_CONFIG_PATH", "/tmp/rsu.json")
        assert get_gateway_config_path() == "/tmp/rsu.json"
