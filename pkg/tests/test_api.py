import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from api.main import app

EXAMPLES = Path(__file__).resolve().parent.parent / "data" / "examples"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_root(client):
    resp = client.get("/")
    assert resp.status_code == 200
    assert "running" in resp.json()["message"]


def test_health(client):
    data = client.get("/health").json()
    assert data["status"] == "ok", data["details"]
    assert set(data["details"]) == {"templates", "linalg", "mcg_certificates"}


def test_invariants_of_unknot(client):
    text = (EXAMPLES / "unknot_minus.surg").read_text()
    data = client.post("/invariants/", json={"text": text}).json()
    assert data["success"]
    assert data["Q"] == [[-2]]
    assert data["d3"] == "1/4"
    assert data["delta"] == "1"
    assert data["components"][0]["tb"] == -1


def test_invariants_of_empty_text(client):
    data = client.post("/invariants/", json={"text": "  "}).json()
    assert data["success"]
    assert data["d3"] == "0"


def test_invariants_reports_bad_input(client):
    data = client.post("/invariants/", json={"text": "front bad\nL 1\nR 1\n"}).json()
    assert not data["success"]
    assert data["error"]


def test_invariants_needs_a_body(client):
    assert client.post("/invariants/", json={}).status_code == 422


def test_independence(client):
    data = client.get("/moves/indep").json()
    assert data["rank"] == 3
    assert data["vectors"]["L"] == ["1", "-1", "0", "-1"]


def test_schur(client):
    data = client.post("/moves/schur", json={"move": "lantern", "samples": 5}).json()
    assert data["success"]
    assert data["passed"] == data["samples"] == 5
    bad = client.post("/moves/schur", json={"move": "hop"}).json()
    assert not bad["success"]


def test_apply(client):
    text = (EXAMPLES / "pair.surg").read_text()
    data = client.post("/moves/apply", json={"text": text, "move": "cancel-remove", "window": "0:6@0"}).json()
    assert data["success"]
    assert data["d3_before"] == data["d3_after"] == "0"
    bad = client.post("/moves/apply", json={"text": text, "move": "lantern", "window": "0:6@0"}).json()
    assert not bad["success"]
    assert bad["error"].startswith("PatternMismatch")


def test_certificates(client):
    names = client.get("/mcg/certificates").json()["certificates"]
    assert len(names) == 9
    assert "lantern_destabilization" in names


def test_replay(client):
    data = client.get("/mcg/replay/handleslide_left_pm").json()
    assert data["success"]
    assert data["words"][0] == "a+ b-"
    back = client.get("/mcg/replay/handleslide_left_pm", params={"backward": True}).json()
    assert back["direction"] == "backward"
    assert back["success"]
    assert client.get("/mcg/replay/no_such_certificate").status_code == 404
