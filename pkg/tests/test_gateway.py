"""Тесты локального шлюза RSU."""

import json

import pytest
from fastapi.testclient import TestClient

from modes import gateway


@pytest.fixture
def client(tmp_path):
    gateway.configure_store(str(tmp_path / "rsu_config.json"))
    return TestClient(gateway.app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["enabled"] is True


def test_defaults(client):
    assert client.get("/rsu").json() == {
        "enabled": True,
        "bump_speed_kmh": 6,
        "zone_length_m": 20,
        "beacon_interval_s": 0.1,
    }


def test_partial_update_persisted(client, tmp_path):
    response = client.put("/rsu", json={"bump_speed_kmh": 10})
    assert response.status_code == 200
    assert response.json()["bump_speed_kmh"] == 10
    assert response.json()["zone_length_m"] == 20
    saved = json.loads((tmp_path / "rsu_config.json").read_text(encoding="utf-8"))
    assert saved["bump_speed_kmh"] == 10


@pytest.mark.parametrize("body", [
    {"bump_speed_kmh": 13},
    {"bump_speed_kmh": 0},
    {"zone_length_m": 0},
    {"beacon_interval_s": 0},
    {"bump_speed_kmh": "fast"},
])
def test_invalid_update_rejected(client, body):
    assert client.put("/rsu", json=body).status_code == 422
    assert client.get("/rsu").json()["bump_speed_kmh"] == 6


def test_enable_disable(client):
    assert client.post("/rsu/disable").json()["enabled"] is False
    assert client.get("/health").json()["enabled"] is False
    assert client.post("/rsu/enable").json()["enabled"] is True


def test_frame(client):
    body = client.get("/rsu/frame").json()
    assert body == {"enabled": True, "frame_hex": "B5 06 14 00 A8", "length": 5}
    client.put("/rsu", json={"bump_speed_kmh": 12})
    assert client.get("/rsu/frame").json()["frame_hex"] == "B5 0C 14 00 2F"
