import pytest

from modeshift import datasets
from modeshift.inventory import build_baseline
from modeshift.mobsim.engine import DaySimulation, build_simulation, simulate_day
from modeshift.mobsim.world import InvalidLeverValue, PolicyLevers


@pytest.fixture(scope="module")
def demo_run(demo_world, factors, tract_map):
    return simulate_day(demo_world, None, factors, seed=7, tracts=tract_map)


class TestDeterminism:
    def test_identical_hash_across_three_runs(self, demo_world, factors, tract_map):
        hashes = {
            simulate_day(demo_world, None, factors, seed=11, tracts=tract_map, n_agents=600).result_hash()
            for _ in range(3)
        }
        assert len(hashes) == 1

    def test_different_seeds_differ(self, demo_world, factors, tract_map):
        a = simulate_day(demo_world, None, factors, seed=1, tracts=tract_map, n_agents=400)
        b = simulate_day(demo_world, None, factors, seed=2, tracts=tract_map, n_agents=400)
        assert a.result_hash() != b.result_hash()


class TestConservation:
    def test_trips_started_equal_completed(self, demo_run):
        assert demo_run.trips_started == demo_run.trips_completed

    def test_parking_identity(self, demo_run):
        for hub in demo_run.hub_stats:
            assert hub["parked_in"] == hub["parked_out"] + hub["occupancy_end"]
            assert hub["peak_occupancy"] <= hub["spaces"]

    def test_charging_identity(self, demo_run):
        for hub in demo_run.hub_stats:
            assert (
                hub["charge_sessions_started"]
                == hub["charge_sessions_completed"] + hub["charge_sessions_in_progress"]
            )
            assert hub["charge_wait_mean_min"] >= 0.0
            assert 0.0 <= hub["charger_utilization"] <= 1.0

    def test_mode_shares_sum_to_one(self, demo_run):
        assert abs(sum(demo_run.mode_shares.values()) - 1.0) <= 1e-9


class TestEmissionsOracle:
    def test_simresult_equals_inventory_over_own_vmt_log(self, demo_run, factors):
        inventory = build_baseline(demo_run.activity_records(), factors, 2014)
        assert inventory.total_mtco2e == demo_run.total_mtco2e  # exact, same fold

    def test_zone_grid_sums_to_total(self, demo_run):
        assert sum(demo_run.zone_hour_mtco2e.values()) == pytest.approx(
            demo_run.total_mtco2e, rel=1e-9
        )

    def test_all_ev_drivers_zero_tailpipe(self, tiny_world, factors):
        world = tiny_world(with_transit=False, ev_ownership=1.0, no_vehicle=0.0)
        result = simulate_day(world, None, factors, seed=3, n_agents=200)
        drive_share = result.mode_shares["DriveEV"]
        assert drive_share > 0.5  # drives dominate without transit
        assert result.mode_shares["DriveGas"] == 0.0
        assert result.total_mtco2e == 0.0


class TestLeverResponses:
    def test_scenario4_mobility_preset_cuts_vmt_near_20_percent(
        self, demo_world, factors, tract_map
    ):
        control = simulate_day(demo_world, None, factors, seed=7, tracts=tract_map)
        preset = PolicyLevers().merged(datasets.lever_preset("scenario4-mobility"))
        treated = simulate_day(demo_world, preset, factors, seed=7, tracts=tract_map)
        ratio = treated.vehicle_vmt / control.vehicle_vmt
        assert ratio == pytest.approx(0.80, abs=0.02)

    def test_congestion_price_monotone_on_paired_seed(self, demo_world, factors, tract_map):
        control = simulate_day(demo_world, None, factors, seed=21, tracts=tract_map, n_agents=800)
        priced = simulate_day(
            demo_world,
            PolicyLevers(congestion_price=8.0),
            factors,
            seed=21,
            tracts=tract_map,
            n_agents=800,
        )
        drive = lambda r: r.mode_shares["DriveGas"] + r.mode_shares["DriveEV"]
        assert drive(priced) <= drive(control)
        assert drive(priced) < drive(control)  # strict at this price

    def test_more_charger_ports_weakly_reduce_wait(self, tiny_world, factors):
        world = tiny_world(ev_ownership=0.9, no_vehicle=0.0, hub_ports=1, hub_spaces=200)
        base = simulate_day(world, None, factors, seed=13, n_agents=400)
        more = simulate_day(
            world, PolicyLevers(charger_ports_added=3), factors, seed=13, n_agents=400
        )
        wait = lambda r: max(h["charge_wait_mean_min"] for h in r.hub_stats)
        assert wait(more) <= wait(base)

    def test_mid_run_price_jump_lowers_subsequent_drive_share(self, demo_world, factors, tract_map):
        def run(price):
            sim = build_simulation(demo_world, None, factors, seed=5, n_agents=800, tracts=tract_map)
            if price:
                sim.apply_levers({"congestion_price": price}, effective_tick=300)
            return sim.run()

        control = run(0.0)
        treated = run(9.0)

        def drive_share_after(result, tick):
            after = [c for c in result.choices if c[0] >= tick and c[2] == 0]
            drives = [c for c in after if c[3] in ("DriveGas", "DriveEV")]
            return len(drives) / len(after)

        assert drive_share_after(treated, 300) < drive_share_after(control, 300)

    def test_identical_lever_resubmission_is_noop(self, demo_world, factors, tract_map):
        sim = build_simulation(demo_world, None, factors, seed=1, n_agents=100, tracts=tract_map)
        first = sim.apply_levers({"congestion_price": 3.0})
        second = sim.apply_levers({"congestion_price": 3.0})
        assert first.snapshot_id == second.snapshot_id

    def test_request_id_retry_returns_same_snapshot(self, demo_world, factors, tract_map):
        sim = build_simulation(demo_world, None, factors, seed=1, n_agents=100, tracts=tract_map)
        first = sim.apply_levers({"congestion_price": 3.0}, request_id="rq-1")
        retry = sim.apply_levers({"congestion_price": 99.0}, request_id="rq-1")
        assert retry is first

    def test_negative_price_rejected(self, demo_world, factors, tract_map):
        sim = build_simulation(demo_world, None, factors, seed=1, n_agents=100, tracts=tract_map)
        with pytest.raises(InvalidLeverValue):
            sim.apply_levers({"congestion_price": -1.0})
        with pytest.raises(InvalidLeverValue):
            PolicyLevers(transit_headway_multiplier=0.0)

    def test_unknown_lever_rejected(self):
        with pytest.raises(InvalidLeverValue):
            PolicyLevers().merged({"warp_drive": 1.0})


class TestSnapshots:
    def test_cadence_arithmetic_24_interim(self, demo_world, factors, tract_map):
        frames = []
        sim = build_simulation(demo_world, None, factors, seed=3, n_agents=300, tracts=tract_map)
        result = sim.run(snapshot_cadence=60, on_snapshot=frames.append)
        assert result.horizon_tick == 1440
        assert [f["tick"] for f in frames] == [60 * k for k in range(1, 25)]

    def test_snapshot_metrics_monotone(self, demo_world, factors, tract_map):
        frames = []
        sim = build_simulation(demo_world, None, factors, seed=3, n_agents=300, tracts=tract_map)
        sim.run(snapshot_cadence=120, on_snapshot=frames.append)
        vmt = [f["vehicle_vmt"] for f in frames]
        emissions = [f["total_mtco2e"] for f in frames]
        assert all(b >= a for a, b in zip(vmt, vmt[1:]))
        assert all(b >= a for a, b in zip(emissions, emissions[1:]))

    def test_bus_vmt_scales_with_headway_lever(self, demo_world, factors, tract_map):
        base = simulate_day(demo_world, None, factors, seed=2, tracts=tract_map, n_agents=100)
        dense = simulate_day(
            demo_world,
            PolicyLevers(transit_headway_multiplier=0.5),
            factors,
            seed=2,
            tracts=tract_map,
            n_agents=100,
        )
        assert dense.bus_vmt == pytest.approx(2 * base.bus_vmt, rel=0.05)


class TestDeskScaleEnvelope:
    def test_50_zones_50k_agents_within_budget(self, tmp_path, factors):
        """Validated envelope: 50 zones, 50,000 agents, one day, conservation
        intact, comfortably inside the suite's runtime budget."""
        import json as _json
        import time

        from modeshift.mobsim.world import load_world

        root = tmp_path / "big"
        (root / "gtfs").mkdir(parents=True)
        n_zones = 50
        zone_ids = [f"q{i:02d}" for i in range(n_zones)]
        features = []
        for i, zid in enumerate(zone_ids):
            x, y = -95.8 + (i % 8) * 0.07, 29.4 + (i // 8) * 0.07
            ring = [[x, y], [x + 0.07, y], [x + 0.07, y + 0.07], [x, y + 0.07], [x, y]]
            features.append(
                {
                    "type": "Feature",
                    "geometry": {"type": "Polygon", "coordinates": [ring]},
                    "properties": {
                        "zone": zid,
                        "population": 40_000 if i else 8_000,
                        "employment": 3_000 if i else 120_000,
                    },
                }
            )
        (root / "zones.geojson").write_text(
            _json.dumps({"type": "FeatureCollection", "features": features})
        )
        rows = ["from_zone,to_zone,distance_miles,freeflow_min,capacity_vph"]
        for i in range(n_zones):
            nxt = zone_ids[(i + 1) % n_zones]
            rows.append(f"{zone_ids[i]},{nxt},4.0,5.0,4000")
            rows.append(f"{nxt},{zone_ids[i]},4.0,5.0,4000")
            if i != 0:
                rows.append(f"{zone_ids[i]},q00,9.0,10.0,6000")
                rows.append(f"q00,{zone_ids[i]},9.0,10.0,6000")
        (root / "edges.csv").write_text("\n".join(rows) + "\n")
        (root / "hubs.csv").write_text(
            "hub_id,zone,parking_spaces,charger_ports,routes\nhub_q,q25,400,6,R1\n"
        )
        (root / "gtfs" / "stops.txt").write_text(
            "stop_id,zone\n" + "\n".join(f"s{z},{z}" for z in ("q25", "q12", "q00")) + "\n"
        )
        (root / "gtfs" / "routes.txt").write_text("route_id,route_name\nR1,radial\n")
        trips = ["trip_id,route_id"]
        stop_times = ["trip_id,stop_id,arrival_min,stop_sequence"]
        for k, start in enumerate(range(300, 1300, 10)):
            trips.append(f"t{k},R1")
            stop_times.append(f"t{k},sq25,{start},0")
            stop_times.append(f"t{k},sq12,{start + 12},1")
            stop_times.append(f"t{k},sq00,{start + 24},2")
        (root / "gtfs" / "trips.txt").write_text("\n".join(trips) + "\n")
        (root / "gtfs" / "stop_times.txt").write_text("\n".join(stop_times) + "\n")
        (root / "agents.json").write_text(
            _json.dumps(
                {
                    "n_agents": 50_000,
                    "employment_rate": 0.8,
                    "income_bands": {
                        "mid": {"share": 1.0, "value_of_time": 18.0, "ev_ownership": 0.08, "no_vehicle": 0.06}
                    },
                    "priced_zones": ["q00"],
                    "costs": {"gas_per_mile": 0.155, "ev_per_mile": 0.045, "transit_fare": 1.25},
                    "choice": {"scale": 2.0},
                    "am_window": [360, 540],
                    "pm_window": [960, 1140],
                    "sim_year": 2014,
                }
            )
        )
        world = load_world(root)
        start = time.monotonic()
        result = simulate_day(world, None, factors, seed=1)
        elapsed = time.monotonic() - start
        assert result.n_agents == 50_000
        assert result.trips_started == result.trips_completed
        assert abs(sum(result.mode_shares.values()) - 1.0) <= 1e-9
        assert elapsed < 120.0


class TestRunFailureFrame:
    def test_failed_run_emits_error_frame(self, demo_world, monkeypatch):
        from modeshift.gateway.config import GatewayConfig
        from modeshift.gateway.runs import ManagedRun, RunState

        run = ManagedRun("fail-test", demo_world, seed=1, levers=None, cadence=60, n_agents=50)

        def boom(**kwargs):
            raise RuntimeError("synthetic failure")

        monkeypatch.setattr(run.sim, "run", boom)
        run.start()
        run.join(timeout=10)
        assert run.state is RunState.FAILED
        frames = run.snapshots_since(-1)
        assert frames and frames[-1]["state"] == "Failed"
        assert frames[-1]["final"] is True
        assert "synthetic failure" in frames[-1]["error"]
        # the stream terminates with the error frame
        streamed = list(run.stream_frames(-1))
        assert streamed[-1]["state"] == "Failed"


class TestWorldValidation:
    def test_demo_world_validates(self, demo_world):
        demo_world.validate()

    def test_disconnected_world_lists_problems(self, tiny_world):
        world = tiny_world()
        # sever zone a: drop every edge touching it
        world.edges = [e for e in world.edges if "a" not in (e.from_zone, e.to_zone)]
        world._compute_paths()
        from modeshift.mobsim.world import ValidationFailure

        with pytest.raises(ValidationFailure) as err:
            world.validate()
        assert any("no path" in p for p in err.value.problems)
