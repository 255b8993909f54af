import itertools
import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from modeshift import datasets
from modeshift.gateway.config import GatewayConfig
from modeshift.gateway.runs import RunState, _TRANSITIONS
from modeshift.gateway.service import create_app
from modeshift.mobsim.engine import simulate_day
from modeshift.mobsim.world import load_world


@pytest.fixture(scope="module")
def client():
    app = create_app(GatewayConfig(snapshot_cadence=60))
    with TestClient(app) as c:
        yield c


def _wait_completed(client, run_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        handle = client.get(f"/v1/runs/{run_id}").json()
        if handle["state"] in ("Completed", "Failed"):
            return handle
        time.sleep(0.05)
    raise TimeoutError(f"run {run_id} did not finish")


def _create(client, **overrides):
    body = {"world": "demo", "seed": 7, "n_agents": 300}
    body.update(overrides)
    response = client.post("/v1/runs", json=body)
    assert response.status_code == 201
    return response.json()


class TestReferenceEndpoints:
    def test_baseline_summary(self, client):
        data = client.get("/v1/baseline").json()
        assert data["on_road_total_mtco2e"] == pytest.approx(15_932_882, rel=1e-3)
        assert round(data["sector_shares"]["transportation"], 2) == 0.48

    def test_baseline_geojson(self, client):
        geo = client.get("/v1/baseline/emissions-map.geojson").json()
        assert geo["type"] == "FeatureCollection"
        assert "hour_08" in geo["features"][0]["properties"]

    def test_scenarios_evaluate(self, client):
        body = {"specs": ["bau", "scenario1", "scenario2", "scenario3", "scenario4"]}
        data = client.post("/v1/scenarios/evaluate", json=body).json()
        by_name = {r["name"]: r for r in data["results"]}
        assert by_name["scenario4"]["reduction"][-1] == pytest.approx(0.70, abs=0.005)
        assert all(row["pass"] for row in by_name["scenario4"]["compliance"] if row["kind"] == "reduction")
        assert not any(row["pass"] for row in by_name["bau"]["compliance"] if row["kind"] == "reduction")

    def test_invalid_spec_422(self, client):
        assert client.post("/v1/scenarios/evaluate", json={"specs": ["nope"]}).status_code == 422

    def test_equity_tracts_json_and_geojson(self, client):
        scores = client.get("/v1/equity/tracts").json()["scores"]
        assert len(scores) == 100
        geo = client.get("/v1/equity/tracts", params={"format": "geojson"}).json()
        assert len(geo["features"]) == 100
        tract = scores[0]
        feature = next(f for f in geo["features"] if f["properties"]["tract_id"] == tract["tract_id"])
        assert feature["properties"]["index"] == tract["index"]

    def test_charger_ratio_endpoint(self, client):
        data = client.get("/v1/equity/charger-ratio", params={"evs": 22_000, "chargers": 1_000}).json()
        assert data["per_charger"] == 22.0

    def test_lever_bounds_served(self, client):
        bounds = client.get("/v1/levers/bounds").json()["bounds"]
        assert bounds["congestion_price"]["max"] > 0

    def test_world_zones(self, client):
        geo = client.get("/v1/worlds/demo/zones.geojson").json()
        assert len(geo["features"]) == 12

    def test_unknown_world_404(self, client):
        assert client.get("/v1/worlds/atlantis/zones.geojson").status_code == 404


class TestRunLifecycle:
    def test_cli_api_equivalence(self, client, factors, tract_map):
        run = _create(client, seed=17, n_agents=500, request_id="equiv-1")
        client.post(f"/v1/runs/{run['run_id']}/start")
        _wait_completed(client, run["run_id"])
        api_result = client.get(f"/v1/runs/{run['run_id']}/result").json()

        world = load_world(datasets.world_dir("demo"))
        direct = simulate_day(world, None, factors, seed=17, n_agents=500, tracts=tract_map)
        assert api_result["total_mtco2e"] == direct.total_mtco2e
        assert api_result["vehicle_vmt"] == direct.vehicle_vmt
        assert api_result["mode_shares"] == {k: v for k, v in direct.mode_shares.items()}

    def test_patch_levers_on_completed_run_is_409(self, client):
        run = _create(client)
        client.post(f"/v1/runs/{run['run_id']}/start")
        _wait_completed(client, run["run_id"])
        response = client.patch(
            f"/v1/runs/{run['run_id']}/levers", json={"changes": {"congestion_price": 3.0}}
        )
        assert response.status_code == 409
        assert response.json()["code"] == "illegal_transition"

    def test_snapshots_since_filter(self, client):
        run = _create(client)
        client.post(f"/v1/runs/{run['run_id']}/start")
        _wait_completed(client, run["run_id"])
        all_frames = client.get(f"/v1/runs/{run['run_id']}/snapshots", params={"since": -1}).json()[
            "snapshots"
        ]
        later = client.get(f"/v1/runs/{run['run_id']}/snapshots", params={"since": 720}).json()[
            "snapshots"
        ]
        assert [f["tick"] for f in later] == [f["tick"] for f in all_frames if f["tick"] > 720]

    def test_snapshot_cadence_counts(self, client):
        run = _create(client, cadence=60)
        client.post(f"/v1/runs/{run['run_id']}/start")
        _wait_completed(client, run["run_id"])
        frames = client.get(f"/v1/runs/{run['run_id']}/snapshots", params={"since": -1}).json()[
            "snapshots"
        ]
        interim = [f for f in frames if not f["final"]]
        finals = [f for f in frames if f["final"]]
        assert len(interim) == 24
        assert len(finals) == 1
        assert finals[0]["state"] == "Completed"
        # the final frame agrees with the completed SimResult
        result = client.get(f"/v1/runs/{run['run_id']}/result").json()
        assert finals[0]["total_mtco2e"] == result["total_mtco2e"]
        assert finals[0]["vehicle_vmt"] == result["vehicle_vmt"]

    def test_unknown_run_404(self, client):
        assert client.get("/v1/runs/nope").status_code == 404
        assert client.post("/v1/runs/nope/start").status_code == 404

    def test_concurrent_runs_independent_and_deterministic(self, client):
        a = _create(client, seed=33, n_agents=250)
        b = _create(client, seed=33, n_agents=250)
        client.post(f"/v1/runs/{a['run_id']}/start")
        client.post(f"/v1/runs/{b['run_id']}/start")
        _wait_completed(client, a["run_id"])
        _wait_completed(client, b["run_id"])
        ra = client.get(f"/v1/runs/{a['run_id']}/result").json()
        rb = client.get(f"/v1/runs/{b['run_id']}/result").json()
        assert ra["total_mtco2e"] == rb["total_mtco2e"]
        assert ra["mode_shares"] == rb["mode_shares"]

    def test_create_with_invalid_lever_422(self, client):
        response = client.post(
            "/v1/runs", json={"world": "demo", "seed": 1, "levers": {"congestion_price": -5}}
        )
        assert response.status_code == 422

    def test_request_id_idempotent_create(self, client):
        a = _create(client, request_id="same-req")
        b = _create(client, request_id="same-req")
        assert a["run_id"] == b["run_id"]

    def test_request_id_idempotent_start(self, client):
        run = _create(client, seed=14, n_agents=100)
        rid = run["run_id"]
        assert client.post(f"/v1/runs/{rid}/start", json={"request_id": "go-1"}).status_code == 200
        _wait_completed(client, rid)
        # retry with the same request id after completion: acknowledged no-op
        retry = client.post(f"/v1/runs/{rid}/start", json={"request_id": "go-1"})
        assert retry.status_code == 200
        # a fresh start without the id is still an illegal transition
        assert client.post(f"/v1/runs/{rid}/start").status_code == 409

    def test_pause_resume_roundtrip(self, client):
        app = create_app(GatewayConfig(snapshot_cadence=60, tick_ms=2.0))
        with TestClient(app) as slow:
            run = slow.post("/v1/runs", json={"world": "demo", "seed": 3, "n_agents": 200}).json()
            rid = run["run_id"]
            slow.post(f"/v1/runs/{rid}/start")
            time.sleep(0.2)
            assert slow.post(f"/v1/runs/{rid}/pause").json()["state"] == "Paused"
            tick_a = slow.get(f"/v1/runs/{rid}").json()["lever_history"]
            time.sleep(0.3)
            snap = slow.patch(f"/v1/runs/{rid}/levers", json={"changes": {"congestion_price": 2.0}})
            assert snap.status_code == 200  # levers accepted while paused
            assert slow.post(f"/v1/runs/{rid}/start").json()["state"] == "Running"
            _wait_completed(slow, rid)

    def test_long_poll_waits_for_frames(self, client):
        app = create_app(GatewayConfig(snapshot_cadence=60, tick_ms=1.0))
        with TestClient(app) as slow:
            run = slow.post("/v1/runs", json={"world": "demo", "seed": 4, "n_agents": 150}).json()
            rid = run["run_id"]
            slow.post(f"/v1/runs/{rid}/start")
            frames = slow.get(f"/v1/runs/{rid}/snapshots", params={"since": -1, "wait_s": 10}).json()[
                "snapshots"
            ]
            assert frames, "long-poll should return at least one frame"
            _wait_completed(slow, rid)


class TestStreaming:
    def test_stream_terminates_with_final_frame(self, client):
        run = _create(client, seed=9, n_agents=200)
        rid = run["run_id"]
        client.post(f"/v1/runs/{rid}/start")
        _wait_completed(client, rid)
        with client.stream("GET", f"/v1/runs/{rid}/stream", params={"from_tick": -1}) as response:
            frames = [json.loads(line) for line in response.iter_lines() if line]
        assert [f["tick"] for f in frames] == [60 * k for k in range(1, 25)] + [1440]
        assert frames[-1]["final"] is True

    def test_two_subscribers_identical_sequences(self, client):
        run = _create(client, seed=10, n_agents=200)
        rid = run["run_id"]

        results = {}

        def subscribe(tag):
            with client.stream("GET", f"/v1/runs/{rid}/stream", params={"from_tick": -1}) as response:
                results[tag] = [line for line in response.iter_lines() if line]

        threads = [threading.Thread(target=subscribe, args=(t,)) for t in ("a", "b")]
        for t in threads:
            t.start()
        time.sleep(0.1)
        client.post(f"/v1/runs/{rid}/start")
        for t in threads:
            t.join(timeout=30)
        assert results["a"] == results["b"]
        assert len(results["a"]) == 25

    def test_catch_up_frame_for_late_joiner(self, client):
        run = _create(client, seed=12, n_agents=150)
        rid = run["run_id"]
        client.post(f"/v1/runs/{rid}/start")
        _wait_completed(client, rid)
        # join after completion with no cursor: first frame is the latest
        with client.stream("GET", f"/v1/runs/{rid}/stream") as response:
            frames = [json.loads(line) for line in response.iter_lines() if line]
        assert len(frames) == 1
        assert frames[0]["final"] is True

    def test_lever_patch_mid_run_reflected_in_snapshot_ids(self, client):
        app = create_app(GatewayConfig(snapshot_cadence=60, tick_ms=1.0))
        with TestClient(app) as slow:
            run = slow.post("/v1/runs", json={"world": "demo", "seed": 5, "n_agents": 200}).json()
            rid = run["run_id"]
            slow.post(f"/v1/runs/{rid}/start")
            time.sleep(0.15)
            snap = slow.patch(
                f"/v1/runs/{rid}/levers", json={"changes": {"congestion_price": 4.0}}
            ).json()
            _wait_completed(slow, rid)
            frames = slow.get(f"/v1/runs/{rid}/snapshots", params={"since": -1}).json()["snapshots"]
            assert any(f["lever_snapshot_id"] >= snap["snapshot_id"] for f in frames)
            final = frames[-1]
            assert final["levers"]["congestion_price"] == 4.0


class TestStateMachineEnumeration:
    def test_all_transitions_against_model(self):
        states = list(RunState)
        legal = _TRANSITIONS
        # enumerate the full 5x5 graph and assert the model matches the
        # documented machine exactly
        expected_legal = {
            (RunState.CREATED, RunState.RUNNING),
            (RunState.RUNNING, RunState.PAUSED),
            (RunState.PAUSED, RunState.RUNNING),
            (RunState.RUNNING, RunState.COMPLETED),
            (RunState.RUNNING, RunState.FAILED),
            (RunState.PAUSED, RunState.FAILED),
        }
        for a, b in itertools.product(states, states):
            assert ((a, b) in legal) == ((a, b) in expected_legal), (a, b)

    def test_client_visible_transitions(self, client):
        run = _create(client, seed=2, n_agents=100)
        rid = run["run_id"]
        # pause before start: Created -> Paused is illegal
        assert client.post(f"/v1/runs/{rid}/pause").status_code == 409
        client.post(f"/v1/runs/{rid}/start")
        _wait_completed(client, rid)
        # start after completion: Completed -> Running is illegal
        assert client.post(f"/v1/runs/{rid}/start").status_code == 409
        assert client.post(f"/v1/runs/{rid}/pause").status_code == 409
