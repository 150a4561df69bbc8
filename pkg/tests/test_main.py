import json

import pytest
from fastapi.testclient import TestClient

import main

SECRET = "test-secret"


@pytest.fixture
def client(monkeypatch):
    monkeypatch.setattr(main, "SHARED_SECRET", SECRET)
    return TestClient(main.app)


def _job(job_type, params=None, version=None):
    return {
        "version": version or main.API_VERSION,
        "job_id": f"j_{job_type}",
        "job_type": job_type,
        "params": params or {},
    }


def _auth(secret=SECRET):
    return {"Authorization": f"Bearer {secret}"}


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    body = r.json()
    assert body["ok"] is True
    assert body["rules_ready"] is True
    assert body["rules_count"] > 0


def test_auth_errors(client):
    r = client.post("/odometer/jobs", json=_job("codec_render", {"pair": "bwd1duals1"}))
    assert r.status_code == 401
    assert r.json()["errors"][0]["code"] == "auth_error"
    r = client.post("/odometer/jobs", json=_job("codec_render", {"pair": "bwd1duals1"}), headers=_auth("wrong"))
    assert r.status_code == 403


def test_raw_secret_header(client):
    r = client.post(
        "/odometer/jobs", json=_job("codec_render", {"pair": "bwd1duals1"}), headers={"X-Shared-Secret": SECRET}
    )
    assert r.status_code == 200


def test_server_without_secret(monkeypatch):
    monkeypatch.setattr(main, "SHARED_SECRET", "")
    r = TestClient(main.app).post("/odometer/jobs", json=_job("codec_render"), headers=_auth())
    assert r.status_code == 500
    assert r.json()["errors"][0]["code"] == "unknown"


def test_version_and_schema_errors(client):
    r = client.post("/odometer/jobs", json=_job("codec_render", version="0"), headers=_auth())
    assert r.status_code == 400
    assert r.json()["errors"][0]["code"] == "version_error"
    r = client.post("/odometer/jobs", json=_job("bogus"), headers=_auth())
    assert r.status_code == 400
    assert r.json()["errors"][0]["code"] == "schema_error"


def test_missing_inputs(client):
    r = client.post("/odometer/jobs", json=_job("codec_render"), headers=_auth())
    assert r.status_code == 422
    assert r.json()["errors"][0]["code"] == "input_unresolved"
    r = client.post("/odometer/jobs", json=_job("gpa_verify", {"samples": main.MAX_SAMPLES + 1}), headers=_auth())
    assert r.status_code == 422
    assert r.json()["errors"][0]["code"] == "engine_refusal"


def test_codec_jobs(client):
    r = client.post("/odometer/jobs", json=_job("codec_render", {"pair": "bwd1v1p1duals1v1x2"}), headers=_auth())
    body = r.json()
    assert r.status_code == 200 and body["ok"]
    assert body["artifact_type"] == "canonical_string"
    assert body["artifact"]["content"] == "bwd1v1p1duals1v1x2,bwd1v1p1duals1v1x2"

    r = client.post("/odometer/jobs", json=_job("codec_parse", {"pair": "bwd1v1p1duals1v1x2"}), headers=_auth())
    assert json.loads(r.json()["artifact"]["content"])["plus"]["duals"] == [[0], [0, 1]]

    r = client.post("/odometer/jobs", json=_job("codec_render", {"pair": "bwd1v1x1duals1v1"}), headers=_auth())
    assert r.status_code == 422
    assert "row-length mismatch" in r.json()["errors"][0]["message"]


def test_enumerate_job(client):
    r = client.post("/odometer/jobs", json=_job("enumerate", {"run": {"max_depth": 2}}), headers=_auth())
    assert r.status_code == 200
    content = json.loads(r.json()["artifact"]["content"])
    assert content["summary"]["depth1"] == 1
    assert all(n["depth"] <= 2 for n in content["nodes"])


def test_eliminate_job(client):
    r = client.post("/odometer/jobs", json=_job("eliminate", {"family": "D1", "runs": False}), headers=_auth())
    body = r.json()
    assert r.status_code == 200
    assert body["notes"] == ["D1: eliminated"]
    assert json.loads(body["artifact"]["content"])["eliminated"] is True
