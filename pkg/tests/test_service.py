import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from simproj.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(snapshot_dir=tmp_path / "sessions")
    with TestClient(app) as c:
        yield c


def make_session(client, **overrides):
    body = {"dataset": "wine", "scenario": 1, "init": "pca",
            "family": "linear", "seed": 0, "iterations": 40,
            "control_points": 14}
    body.update(overrides)
    response = client.post("/v1/sessions", json=body)
    assert response.status_code == 200, response.text
    return response.json()


def test_list_datasets(client):
    datasets = client.get("/v1/datasets").json()["datasets"]
    assert {"wine", "cancer", "digits500"} <= set(datasets)


def test_create_session_summary(client):
    summary = make_session(client)
    assert summary["dataset"] == "wine"
    assert summary["steps"] == 1
    assert len(summary["layout"]) == 178
    assert len(summary["control_points"]) == 14
    assert len(summary["loss_trace"]) == 40


def test_unknown_dataset_maps_to_404(client):
    response = client.post("/v1/sessions", json={"dataset": "nope"})
    assert response.status_code == 404
    body = response.json()
    assert body["code"] == "UnknownDataset"
    assert "message" in body


def test_layout_steps(client):
    summary = make_session(client)
    sid = summary["session_id"]
    first = client.get(f"/v1/sessions/{sid}/layout").json()
    assert first["step"] == 0
    assert first["layout"] == summary["layout"]
    missing = client.get(f"/v1/sessions/{sid}/layout", params={"step": 5})
    assert missing.status_code == 404
    assert missing.json()["code"] == "StepOutOfRange"


def test_unknown_session_is_404(client):
    assert client.get("/v1/sessions/nope/layout").status_code == 404


def test_manipulation_then_sync_optimize(client):
    summary = make_session(client)
    sid = summary["session_id"]
    index = summary["control_points"][0]
    response = client.post(f"/v1/sessions/{sid}/manipulation",
                           json={"moves": [[index, 0.5, -0.5]]})
    assert response.json() == {"accepted": 1}

    result = client.post(f"/v1/sessions/{sid}/optimize").json()
    assert len(result["layout"]) == 178
    assert len(result["loss_trace"]) == 40
    assert "nearest_centroid_precision" in result["metrics"]

    after = client.get(f"/v1/sessions/{sid}/layout").json()
    assert after["step"] == 1
    assert after["layout"] == result["layout"]


def test_empty_moves_accepted_as_noop(client):
    summary = make_session(client)
    sid = summary["session_id"]
    response = client.post(f"/v1/sessions/{sid}/manipulation", json={"moves": []})
    assert response.json() == {"accepted": 0}


def test_manipulation_index_out_of_range(client):
    summary = make_session(client)
    sid = summary["session_id"]
    response = client.post(f"/v1/sessions/{sid}/manipulation",
                           json={"moves": [[9999, 0.0, 0.0]]})
    assert response.status_code == 400
    assert response.json()["code"] == "IndexOutOfRange"


def test_scenario2_requires_pending_manipulation(client):
    summary = make_session(client, scenario=2, iterations=15)
    sid = summary["session_id"]
    response = client.post(f"/v1/sessions/{sid}/optimize")
    assert response.status_code == 400
    assert response.json()["code"] == "EmptyManipulation"


def test_scenario2_optimize_applies_moves(client):
    summary = make_session(client, scenario=2, iterations=15)
    sid = summary["session_id"]
    client.post(f"/v1/sessions/{sid}/manipulation",
                json={"moves": [[0, 1.0, 1.0], [1, 1.1, 1.0]]})
    result = client.post(f"/v1/sessions/{sid}/optimize")
    assert result.status_code == 200
    assert len(result.json()["layout"]) == 178


def test_async_job_polling(client):
    summary = make_session(client)
    sid = summary["session_id"]
    client.post(f"/v1/sessions/{sid}/manipulation",
                json={"moves": [[summary['control_points'][0], 0.0, 0.0]]})
    job_id = client.post(f"/v1/sessions/{sid}/optimize",
                         params={"sync": "false"}).json()["job_id"]
    for _ in range(200):
        job = client.get(f"/v1/jobs/{job_id}").json()
        if job["status"] != "running":
            break
        time.sleep(0.05)
    assert job["status"] == "done"
    assert job["error"] is None
    assert len(job["result"]["layout"]) == 178
    assert job["iteration"] == 40


def test_metrics_endpoint(client):
    summary = make_session(client)
    sid = summary["session_id"]
    metrics = client.get(f"/v1/sessions/{sid}/metrics").json()
    assert 0 <= metrics["nearest_centroid_precision"] <= 100
    assert len(metrics["neighbor_error_per_point"]) == 178


def test_unlabeled_session_omits_label_metrics(client):
    summary = make_session(client, unlabeled=True)
    sid = summary["session_id"]
    assert summary["labels"] is None
    metrics = client.get(f"/v1/sessions/{sid}/metrics").json()
    assert "nearest_centroid_precision" not in metrics
    assert "neighbor_error_mean" in metrics


def test_trajectories(client):
    summary = make_session(client)
    sid = summary["session_id"]
    client.post(f"/v1/sessions/{sid}/manipulation",
                json={"moves": [[summary['control_points'][0], 0.2, 0.2]]})
    client.post(f"/v1/sessions/{sid}/optimize")
    response = client.get(f"/v1/sessions/{sid}/trajectories",
                          params={"from_step": 0, "to_step": 1})
    trajectories = response.json()["trajectories"]
    assert len(trajectories) == 178
    assert {"index", "old_xy", "new_xy"} <= set(trajectories[0])
    bad = client.get(f"/v1/sessions/{sid}/trajectories",
                     params={"from_step": 0, "to_step": 9})
    assert bad.status_code == 404


def test_snapshot_restore_round_trip(client, tmp_path):
    summary = make_session(client)
    sid = summary["session_id"]
    client.post(f"/v1/sessions/{sid}/manipulation",
                json={"moves": [[summary['control_points'][1], 0.3, 0.1]]})
    before = client.post(f"/v1/sessions/{sid}/optimize").json()

    path = str(tmp_path / "snap.json")
    saved = client.post(f"/v1/sessions/{sid}/snapshot", json={"path": path}).json()
    assert saved["path"] == path

    restored = client.post("/v1/restore", json={"path": path}).json()
    assert restored["session_id"] == sid
    assert restored["steps"] == 2
    # restored layout is bitwise identical to the live one
    assert restored["layout"] == before["layout"]
    layout = client.get(f"/v1/sessions/{sid}/layout").json()["layout"]
    assert np.array_equal(np.array(layout), np.array(before["layout"]))


def test_restore_rejects_bad_snapshot(client, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"version\": 99}")
    response = client.post("/v1/restore", json={"path": str(path)})
    assert response.status_code == 400
    assert response.json()["code"] == "VersionMismatch"
    path.write_text("not json")
    response = client.post("/v1/restore", json={"path": str(path)})
    assert response.json()["code"] == "SerializationError"
