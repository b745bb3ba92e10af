from fastapi.testclient import TestClient

from apps.web import main as web_main
from packages.storage.db import Storage


def _client(tmp_path, monkeypatch) -> TestClient:
    monkeypatch.setattr(web_main, "storage", Storage(str(tmp_path / "web.db")))
    return TestClient(web_main.app)


def test_catalog_page_lists_entries(tmp_path, monkeypatch) -> None:
    with _client(tmp_path, monkeypatch) as client:
        response = client.get("/")
    assert response.status_code == 200
    assert "dP3" in response.text
    assert "reciprocal_case" in response.text


def test_catalog_api(tmp_path, monkeypatch) -> None:
    with _client(tmp_path, monkeypatch) as client:
        listing = client.get("/api/catalog").json()
        entry = client.get("/api/catalog/dP4/zero")
        missing = client.get("/api/catalog/dP4/nowhere")
    assert listing["total_generators"] == 29
    assert entry.status_code == 200
    assert [g["label"] for g in entry.json()["generators"]] == ["X1", "X2", "X3", "X4"]
    assert missing.status_code == 404
    assert missing.json()["status"] == "error"


def test_verify_is_cached(tmp_path, monkeypatch) -> None:
    body = {"id": "dP1", "branch": "zero", "generator": "X2"}
    with _client(tmp_path, monkeypatch) as client:
        first = client.post("/api/verify", json=body).json()
        second = client.post("/api/verify", json=body).json()
    assert first["status"] == "ok"
    assert first["cached"] is False
    assert second["cached"] is True
    assert second["report"] == first["report"]
    assert len(web_main.storage.list_reports(web_main.REPORT_VERIFY)) == 1


def test_verify_errors(tmp_path, monkeypatch) -> None:
    with _client(tmp_path, monkeypatch) as client:
        unknown = client.post("/api/verify", json={"id": "dP9", "branch": "zero"})
        bad_index = client.post("/api/verify", json={"id": "dP1", "branch": "zero", "generator": "12"})
        bad_mode = client.post("/api/verify", json={"id": "dP1", "branch": "zero", "mode": "guess"})
        bad_value = client.post("/api/verify", json={"id": "dP1", "branch": "a_nonzero", "params": {"a": "0"}})
    assert unknown.status_code == 404
    assert bad_index.status_code == 404
    assert bad_mode.status_code == 400
    assert bad_value.status_code == 400


def test_simulate_endpoint(tmp_path, monkeypatch) -> None:
    body = {"id": "dP4", "branch": "zero", "init": ["1", "2"], "steps": 4}
    with _client(tmp_path, monkeypatch) as client:
        response = client.post("/api/simulate", json=body)
        too_long = client.post("/api/simulate", json={**body, "steps": 5000})
        singular = client.post("/api/simulate", json={**body, "init": ["1", "-1"]})
    assert response.status_code == 200
    assert [row["re"] for row in response.json()["trajectory"]] == ["1", "2", "-2/3", "1", "2", "-2/3"]
    assert too_long.status_code == 400
    assert singular.json()["first_singular"] == 2


def test_audits_endpoint(tmp_path, monkeypatch) -> None:
    with _client(tmp_path, monkeypatch) as client:
        everything = client.get("/api/audits").json()["audits"]
        ceiling = client.get("/api/audits", params={"formula_id": "dP4-ceiling"}).json()["audits"]
        missing = client.get("/api/audits", params={"formula_id": "nope"})
    assert len(everything) == 7
    assert ceiling[0]["verdict"] == "mismatch"
    assert ceiling[0]["first_fail_n"] == 0
    assert missing.status_code == 404
    assert len(web_main.storage.list_reports(web_main.REPORT_AUDIT)) == 1
