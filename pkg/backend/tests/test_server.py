import pytest
from fastapi.testclient import TestClient

import server

CONFIG_1D = {"dim": 1, "Lx": 10.0, "fault_x": 5.0, "t_f": 0.2, "method": "cg", "ladder": [0.5, 0.25]}


@pytest.fixture
def client(runs_dir):
    return TestClient(server.create_app())


def test_health_and_settings(client):
    assert client.get("/api/health").json()["status"] == "ok"
    settings = client.get("/api/settings").json()
    assert settings["min_interactive_h"] == server.MIN_INTERACTIVE_H
    assert settings["experiments"] == ["converge", "spectrum"]


def test_solve_mixed(client):
    response = client.post("/api/solve/mixed", json={"config": CONFIG_1D, "h": 0.5})
    assert response.status_code == 200
    body = response.json()
    assert body["method"] == "mixed"
    assert body["h"] == 0.5
    assert body["fault"]["total_flux"] == pytest.approx(1.0 / 15.0, abs=1e-6)


def test_solve_new_applies_overrides(client):
    response = client.post("/api/solve/new", json={"config": CONFIG_1D, "h": 0.5, "t_f": 1.0, "eps_mult": 2.0})
    assert response.status_code == 200
    body = response.json()
    assert body["method"] == "cg"
    assert body["t_f"] == 1.0
    assert body["eps"] == pytest.approx(1.0)


def test_solve_new_picks_method_from_dimension(client):
    config = {key: value for key, value in CONFIG_1D.items() if key != "method"}
    response = client.post("/api/solve/new", json={"config": config, "h": 0.5})
    assert response.status_code == 200
    assert response.json()["method"] == "cg"


def test_solve_rejects_bad_requests(client):
    fine = client.post("/api/solve/mixed", json={"config": CONFIG_1D, "h": 0.001})
    assert fine.status_code == 400
    assert "interactive limit" in fine.json()["detail"]

    unknown = client.post("/api/solve/mixed", json={"config": {**CONFIG_1D, "colour": "red"}})
    assert unknown.status_code == 400
    assert "Unknown config keys" in unknown.json()["detail"]


def test_unknown_experiment(client):
    assert client.post("/api/experiments/refine", json={}).status_code == 404


def test_invalid_experiment_config_records_nothing(client, runs_dir):
    response = client.post("/api/experiments/converge", json={"ladder": [0.1, 0.2]})
    assert response.status_code == 400
    assert client.get("/api/experiments").json() == {"runs": []}


def test_convergence_run_in_background(client, runs_dir):
    response = client.post("/api/experiments/converge", json=CONFIG_1D)
    assert response.status_code == 200
    run_id = response.json()["run_id"]
    assert response.json()["status"] == "running"

    thread = server.active_runs.get(run_id)
    if thread is not None:
        thread.join(timeout=120)

    status = client.get(f"/api/experiments/{run_id}").json()
    assert status["status"] == "completed"
    assert any(output.endswith("errors.csv") for output in status["outputs"])
    assert (runs_dir / run_id / "rates.json").exists()
    assert [run["run_id"] for run in client.get("/api/experiments").json()["runs"]] == [run_id]


def test_missing_run(client):
    assert client.get("/api/experiments/converge-unknown").status_code == 404
    assert client.get("/api/experiments/.hidden").status_code == 404
