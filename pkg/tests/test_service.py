import time

import pytest
from fastapi.testclient import TestClient

import beaconplan as bp
from beaconplan.service import create_app

PROJECT = {
    "name": "office",
    "floorplan": {"width_m": 40.0, "height_m": 20.0},
    "channel": {"beta": 3.0, "sigma_dbm": 1.732, "p0_dbm": -59.0},
    "pdr": {
        "step_length_m": 0.625,
        "dmax_rad_per_s": 0.0283,
        "sigma_sn_m": 0.0446,
        "step_period_s": 1.0,
    },
    "grid": {"resolution_m": 2.0},
    "beacons": [
        {"id": "a", "x_m": 10.0, "y_m": 10.0},
        {"id": "b", "x_m": 20.0, "y_m": 5.0},
        {"id": "c", "x_m": 30.0, "y_m": 15.0},
        {"id": "d", "x_m": 20.0, "y_m": 15.0},
    ],
    "optimize": {"beacon_count": 4, "max_evals": 300, "seed": 5},
}


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path / "data"))
    with TestClient(app) as c:
        yield c


@pytest.fixture
def project_id(client):
    resp = client.post("/api/projects", json=PROJECT)
    assert resp.status_code == 200, resp.text
    return resp.json()["id"]


def poll_job(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        payload = client.get(f"/api/jobs/{job_id}").json()
        if payload["state"] in ("DONE", "FAILED"):
            return payload
        time.sleep(0.05)
    raise AssertionError("job did not finish in time")


class TestHealthAndProjects:
    def test_health(self, client):
        assert client.get("/api/health").json() == {"status": "ok"}

    def test_create_and_fetch(self, client, project_id):
        doc = client.get(f"/api/projects/{project_id}").json()
        assert doc["name"] == "office"
        assert doc["version"] == 1
        assert len(doc["beacons"]) == 4

    def test_unknown_id_is_404(self, client):
        assert client.get("/api/projects/NOPE").status_code == 404
        assert client.get("/api/jobs/NOPE").status_code == 404

    def test_invalid_project_is_400_with_field_path(self, client):
        bad = dict(PROJECT, beacons=[{"id": "a", "x_m": 99.0, "y_m": 5.0}])
        resp = client.post("/api/projects", json=bad)
        assert resp.status_code == 400
        assert "beacons[0]" in resp.json()["detail"]

    def test_export_is_canonical_and_stable(self, client, project_id):
        first = client.get(f"/api/projects/{project_id}/export").text
        second = client.get(f"/api/projects/{project_id}/export").text
        assert first == second
        reloaded = bp.load_project(first)
        from beaconplan.project import export_project

        assert export_project(reloaded) == first

    def test_persisted_across_restart(self, tmp_path):
        data_dir = str(tmp_path / "data")
        with TestClient(create_app(data_dir=data_dir)) as c:
            pid = c.post("/api/projects", json=PROJECT).json()["id"]
        with TestClient(create_app(data_dir=data_dir)) as c:
            assert c.get(f"/api/projects/{pid}").status_code == 200


class TestBeaconCas:
    def test_put_bumps_version_by_one(self, client, project_id):
        beacons = [{"id": "a", "x_m": 12.0, "y_m": 10.0}]
        resp = client.put(
            f"/api/projects/{project_id}/beacons", json={"version": 1, "beacons": beacons}
        )
        assert resp.status_code == 200
        assert resp.json()["version"] == 2
        doc = client.get(f"/api/projects/{project_id}").json()
        assert doc["version"] == 2
        assert doc["beacons"] == beacons

    def test_stale_version_is_409(self, client, project_id):
        beacons = [{"id": "a", "x_m": 12.0, "y_m": 10.0}]
        ok = client.put(
            f"/api/projects/{project_id}/beacons", json={"version": 1, "beacons": beacons}
        )
        assert ok.status_code == 200
        stale = client.put(
            f"/api/projects/{project_id}/beacons", json={"version": 1, "beacons": beacons}
        )
        assert stale.status_code == 409

    def test_invalid_beacons_rejected_atomically(self, client, project_id):
        bad = [{"id": "a", "x_m": 12.0, "y_m": 10.0}, {"id": "a", "x_m": 1.0, "y_m": 1.0}]
        resp = client.put(
            f"/api/projects/{project_id}/beacons", json={"version": 1, "beacons": bad}
        )
        assert resp.status_code == 400
        doc = client.get(f"/api/projects/{project_id}").json()
        assert doc["version"] == 1
        assert len(doc["beacons"]) == 4


class TestMaps:
    def test_strength_map_payload(self, client, project_id):
        resp = client.post(
            f"/api/projects/{project_id}/maps", json={"kind": "strength", "resolution_m": 2.0}
        )
        assert resp.status_code == 200
        payload = resp.json()
        assert payload["unit"] == "dBm"
        assert payload["nx"] == 20 and payload["ny"] == 10
        assert len(payload["values"]) == 200
        assert payload["min"] <= payload["max"]

    def test_error_map_null_encodes_unbounded(self, client):
        sparse = dict(PROJECT, beacons=[{"id": "a", "x_m": 20.0, "y_m": 10.0}])
        pid = client.post("/api/projects", json=sparse).json()["id"]
        payload = client.post(
            f"/api/projects/{pid}/maps", json={"kind": "rss_error", "resolution_m": 4.0}
        ).json()
        assert all(v is None for v in payload["values"])
        assert payload["min"] is None and payload["max"] is None

    def test_fused_map_options(self, client, project_id):
        payload = client.post(
            f"/api/projects/{project_id}/maps",
            json={"kind": "fused_error", "resolution_m": 2.0, "pdr_mode": "uniform_horizon",
                  "horizon_steps": 10},
        ).json()
        assert payload["unit"] == "m"
        rss = client.post(
            f"/api/projects/{project_id}/maps", json={"kind": "rss_error", "resolution_m": 2.0}
        ).json()
        for f, r in zip(payload["values"], rss["values"]):
            if r is not None and f is not None:
                assert f <= r

    def test_put_then_map_reflects_new_beacons(self, client, project_id):
        before = client.post(
            f"/api/projects/{project_id}/maps", json={"kind": "strength", "resolution_m": 2.0}
        ).json()
        moved = [dict(b) for b in PROJECT["beacons"]]
        moved[0]["x_m"] = 35.0
        resp = client.put(
            f"/api/projects/{project_id}/beacons", json={"version": 1, "beacons": moved}
        )
        assert resp.status_code == 200
        after = client.post(
            f"/api/projects/{project_id}/maps", json={"kind": "strength", "resolution_m": 2.0}
        ).json()
        assert after["values"] != before["values"]
        assert after["project_version"] == 2

    def test_identical_requests_identical_payloads(self, client, project_id):
        body = {"kind": "rss_error", "resolution_m": 2.0}
        a = client.post(f"/api/projects/{project_id}/maps", json=body).json()
        b = client.post(f"/api/projects/{project_id}/maps", json=body).json()
        assert a == b

    def test_bad_kind_is_400(self, client, project_id):
        resp = client.post(f"/api/projects/{project_id}/maps", json={"kind": "wavelength"})
        assert resp.status_code == 400
        assert "kind" in resp.json()["detail"]


class TestCurves:
    def test_rows_and_dominance(self, client, project_id):
        resp = client.post(
            f"/api/projects/{project_id}/curves",
            json={"start": [5.0, 10.0], "heading": 0.0, "steps": 50},
        )
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert len(rows) == 50
        for row in rows:
            if row["rss_rmse_m"] is not None and row["fused_rmse_m"] is not None:
                assert row["fused_rmse_m"] <= row["rss_rmse_m"]
                assert row["fused_rmse_m"] <= row["pdr_rmse_m"]

    def test_single_step(self, client, project_id):
        rows = client.post(
            f"/api/projects/{project_id}/curves",
            json={"start": [5.0, 10.0], "heading": 0.0, "steps": 1},
        ).json()["rows"]
        assert len(rows) == 1

    def test_trajectory_outside_is_400(self, client, project_id):
        resp = client.post(
            f"/api/projects/{project_id}/curves",
            json={"start": [39.0, 10.0], "heading": 0.0, "steps": 20},
        )
        assert resp.status_code == 400


class TestOptimizeJobs:
    def test_job_runs_to_done_and_beats_initial_layout(self, client, project_id):
        # pre-optimization objective via the map endpoint (independent route)
        payload = client.post(
            f"/api/projects/{project_id}/maps", json={"kind": "rss_error", "resolution_m": 2.0}
        ).json()
        values = payload["values"]
        bounded = [v for v in values if v is not None]
        pre = sum(bounded) / len(bounded) + 20.0 * (1 - len(bounded) / len(values))

        resp = client.post(f"/api/projects/{project_id}/optimize", json={"max_evals": 400})
        assert resp.status_code == 200
        job = poll_job(client, resp.json()["job_id"])
        assert job["state"] == "DONE"
        result = job["result"]
        assert result["best_objective"] <= pre
        assert len(result["best_layout"]["beacons"]) == 4
        assert result["evals_used"] <= 400
        bests = [row[2] for row in result["history"]]
        assert all(b <= a for a, b in zip(bests, bests[1:]))
        assert job["progress"]["evals_used"] == result["evals_used"]

    def test_second_job_while_running_is_409(self, client, project_id):
        first = client.post(
            f"/api/projects/{project_id}/optimize",
            json={"max_evals": 30000, "min_temp_ratio": 1e-9},
        )
        assert first.status_code == 200
        second = client.post(f"/api/projects/{project_id}/optimize", json={"max_evals": 100})
        assert second.status_code == 409
        done = poll_job(client, first.json()["job_id"], timeout=120.0)
        assert done["state"] == "DONE"
        after = client.post(f"/api/projects/{project_id}/optimize", json={"max_evals": 50})
        assert after.status_code == 200
        poll_job(client, after.json()["job_id"])

    def test_job_config_overrides_validated(self, client, project_id):
        resp = client.post(f"/api/projects/{project_id}/optimize", json={"cooling_factor": 7})
        assert resp.status_code == 400
        assert "cooling_factor" in resp.json()["detail"]
