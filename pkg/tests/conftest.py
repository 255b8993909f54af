import json
from pathlib import Path

import pytest

from modeshift import datasets
from modeshift.mobsim.world import load_world


@pytest.fixture(scope="session")
def baseline():
    return datasets.houston2014_baseline()


@pytest.fixture(scope="session")
def base_population():
    return datasets.houston2014_meta()["base_population"]


@pytest.fixture(scope="session")
def factors():
    return datasets.houston2014_factors()


@pytest.fixture(scope="session")
def tracts():
    return datasets.bundled_tracts()


@pytest.fixture(scope="session")
def tract_map(tracts):
    return {t.tract_id: t for t in tracts}


@pytest.fixture(scope="session")
def demo_world():
    return load_world(datasets.world_dir("demo"))


@pytest.fixture()
def tiny_world(tmp_path):
    """Builder for small synthetic world bundles used by engine tests."""

    def _build(
        name="tiny",
        n_agents=300,
        ev_ownership=0.1,
        no_vehicle=0.05,
        with_transit=True,
        hub_spaces=40,
        hub_ports=2,
        priced_zones=("a",),
        employment_rate=1.0,
    ):
        root = tmp_path / name
        (root / "gtfs").mkdir(parents=True)
        zones = {
            "a": (0, 50_000, None),
            "b": (60_000, 4_000, None),
            "c": (50_000, 4_000, None),
        }
        features = []
        for i, (zid, (pop, emp, _)) in enumerate(zones.items()):
            x, y = -95.5 + i * 0.1, 29.7
            ring = [[x, y], [x + 0.1, y], [x + 0.1, y + 0.1], [x, y + 0.1], [x, y]]
            features.append(
                {
                    "type": "Feature",
                    "geometry": {"type": "Polygon", "coordinates": [ring]},
                    "properties": {"zone": zid, "population": pop, "employment": emp},
                }
            )
        (root / "zones.geojson").write_text(json.dumps({"type": "FeatureCollection", "features": features}))

        edges = "from_zone,to_zone,distance_miles,freeflow_min,capacity_vph\n"
        for a, b, miles, ff, cap in [
            ("b", "c", 4.0, 6.0, 2400),
            ("c", "b", 4.0, 6.0, 2400),
            ("c", "a", 8.0, 10.0, 3600),
            ("a", "c", 8.0, 10.0, 3600),
            ("b", "a", 11.0, 13.0, 3600),
            ("a", "b", 11.0, 13.0, 3600),
        ]:
            edges += f"{a},{b},{miles},{ff},{cap}\n"
        (root / "edges.csv").write_text(edges)

        (root / "hubs.csv").write_text(
            "hub_id,zone,parking_spaces,charger_ports,routes\n"
            + (f"hub_c,c,{hub_spaces},{hub_ports},R1\n" if with_transit else f"hub_c,c,{hub_spaces},{hub_ports},\n")
        )

        if with_transit:
            (root / "gtfs" / "stops.txt").write_text("stop_id,zone\ns_a,a\ns_b,b\ns_c,c\n")
            (root / "gtfs" / "routes.txt").write_text("route_id,route_name\nR1,corridor\n")
            trips = "trip_id,route_id\n"
            stop_times = "trip_id,stop_id,arrival_min,stop_sequence\n"
            start = 280
            n = 0
            while start <= 1320:
                trips += f"t{n:03d},R1\n"
                stop_times += f"t{n:03d},s_b,{start},0\n"
                stop_times += f"t{n:03d},s_c,{start + 7},1\n"
                stop_times += f"t{n:03d},s_a,{start + 16},2\n"
                n += 1
                start += 12
            (root / "gtfs" / "trips.txt").write_text(trips)
            (root / "gtfs" / "stop_times.txt").write_text(stop_times)
        else:
            (root / "gtfs" / "stops.txt").write_text("stop_id,zone\n")
            (root / "gtfs" / "routes.txt").write_text("route_id,route_name\n")
            (root / "gtfs" / "trips.txt").write_text("trip_id,route_id\n")
            (root / "gtfs" / "stop_times.txt").write_text("trip_id,stop_id,arrival_min,stop_sequence\n")

        (root / "agents.json").write_text(
            json.dumps(
                {
                    "n_agents": n_agents,
                    "employment_rate": employment_rate,
                    "income_bands": {
                        "mid": {
                            "share": 1.0,
                            "value_of_time": 18.0,
                            "ev_ownership": ev_ownership,
                            "no_vehicle": no_vehicle,
                        }
                    },
                    "priced_zones": list(priced_zones),
                    "costs": {
                        "gas_per_mile": 0.155,
                        "ev_per_mile": 0.045,
                        "transit_fare": 1.25,
                        "parking_fee_priced_zone": 4.0,
                        "ev_premium_per_trip": 2.0,
                        "incentive_per_trip_factor": 0.0005,
                    },
                    "choice": {"scale": 2.0, "walk_access_min": 6.0, "active_speed_mph": 9.0},
                    "charging": {"session_minutes_mean": 90.0, "request_probability": 1.0},
                    "am_window": [360, 540],
                    "pm_window": [960, 1140],
                    "sim_year": 2014,
                }
            )
        )
        return load_world(root)

    return _build
