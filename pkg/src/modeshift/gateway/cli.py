"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import shutil
import sys
from pathlib import Path

from .. import datasets
from ..equity import (
    EquityError,
    LoanTerms,
    affordability_gap,
    charger_ratio,
    compute_equity_index,
    load_tracts_csv,
    scores_to_csv,
    scores_to_geojson,
)
from ..inventory import (
    InventoryError,
    build_baseline,
    dump_inventory_json,
    emissions_map_geojson,
    inventory_summary,
    load_activity_csv,
    load_factors_csv,
)
from ..mobsim.world import InvalidLeverValue, PolicyLevers, ValidationFailure
from ..scenario import (
    ScenarioError,
    apply_scenario,
    check_goals,
    compliance_to_csv,
    compliance_to_json_dict,
    load_scenario_spec,
    size_offsets,
)
from ..trajectory import InvalidTrajectory
from .config import load_config
from .runs import bundled_tract_map, load_world_by_ref

USAGE_EXIT = 64
VALIDATION_EXIT = 1
IO_EXIT = 2

_VALIDATION_ERRORS = (
    InventoryError,
    ScenarioError,
    EquityError,
    InvalidTrajectory,
    InvalidLeverValue,
    ValidationFailure,
    ValueError,
    KeyError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: A003 - argparse hook
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modeshift", description="Urban on-road decarbonization toolkit")
    parser.add_argument("--config", help="gateway config file (TOML or JSON)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate activity/factor CSVs or telemetry JSONL")
    p.add_argument("--activity")
    p.add_argument("--factors")
    p.add_argument("--year", type=int, default=2014)
    p.add_argument("--telemetry", help="line-delimited JSON telemetry records")
    p.add_argument("--key", default="modeshift-dev-key", help="tokenization key for telemetry ingest")
    p.add_argument("--out", help="bundle JSON (CSV mode) or output directory (telemetry mode)")

    p = sub.add_parser("baseline", help="build the baseline inventory")
    p.add_argument("--dataset", default="houston-2014")
    p.add_argument("--activity")
    p.add_argument("--factors")
    p.add_argument("--year", type=int)
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("scenario", help="scenario operations")
    scen_sub = p.add_subparsers(dest="scenario_command", required=True, parser_class=_Parser)
    pr = scen_sub.add_parser("run", help="project a scenario and check goals")
    pr.add_argument("--spec", required=True, help="bundled name (bau, scenario1..4) or a JSON path")
    pr.add_argument("--baseline", default="houston-2014")
    pr.add_argument("--goals", help="goals JSON path (defaults to bundled)")
    pr.add_argument("--offsets", action="store_true", help="also size offsets for the 2050 residual")
    pr.add_argument("--out", help="output directory")

    p = sub.add_parser("equity", help="tract equity index and affordability gap")
    p.add_argument("--tracts", help="tracts CSV (defaults to the bundled 100-tract set)")
    p.add_argument("--price", type=float, default=55_000.0)
    p.add_argument("--incentive", type=float, default=0.0)
    p.add_argument("--apr", type=float, default=0.07)
    p.add_argument("--term-months", type=int, default=60)
    p.add_argument("--evs", type=float, help="EV count for the charger ratio diagnostic")
    p.add_argument("--chargers", type=float, help="public charger count for the ratio diagnostic")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("simulate", help="run one simulated day")
    p.add_argument("--world", default="demo", help="bundled world name or bundle directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levers", help="lever JSON path or bundled preset name")
    p.add_argument("--agents", type=int, help="override agent count")
    p.add_argument("--out", help="output directory")
    p.add_argument("--include-choices", action="store_true")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    p = sub.add_parser("export", help="copy a bundled artifact to a directory")
    p.add_argument("what", choices=["dataset", "world", "scenario", "matrix", "tracts"])
    p.add_argument("name", nargs="?", default="")
    p.add_argument("--out", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return _run_command(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return IO_EXIT


def _run_command(args: argparse.Namespace) -> int:
    if args.command == "ingest":
        return _cmd_ingest(args)
    if args.command == "baseline":
        return _cmd_baseline(args)
    if args.command == "scenario":
        return _cmd_scenario(args)
    if args.command == "equity":
        return _cmd_equity(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "export":
        return _cmd_export(args)
    raise ValueError(f"unknown command {args.command!r}")  # pragma: no cover


def _cmd_ingest(args) -> int:
    if args.telemetry:
        return _cmd_ingest_telemetry(args)
    if not (args.activity and args.factors):
        raise ValueError("ingest needs --activity and --factors, or --telemetry")
    activity = load_activity_csv(args.activity)
    factors = load_factors_csv(args.factors)
    inventory = build_baseline(activity, factors, args.year)
    print(f"ingested {len(activity)} activity rows, {len(factors)} factors")
    print(f"on-road total at year {args.year}: {inventory.total_mtco2e:,.0f} MTCO2e")
    if args.out:
        bundle = {
            "year": args.year,
            "activity_rows": len(activity),
            "factor_rows": len(factors),
            "on_road_total_mtco2e": inventory.total_mtco2e,
        }
        Path(args.out).write_text(json.dumps(bundle, indent=2), encoding="utf-8")
    return 0


def _cmd_ingest_telemetry(args) -> int:
    from ..hubpipe import AcquisitionStage, HubPipeline, TelemetryRecord

    pipeline = HubPipeline(AcquisitionStage(args.key.encode("utf-8")))
    with open(args.telemetry, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                pipeline.ingest(TelemetryRecord.from_json_line(line))
    print(
        f"telemetry: {pipeline.input_count} in = {pipeline.stored_count} stored "
        f"+ {len(pipeline.rejections)} rejected"
    )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        pipeline.write_rejection_log(out / "rejections.csv")
        if pipeline.stored_count:
            aggregates = pipeline.process(float("-inf"), float("inf"))
            (out / "aggregates.json").write_text(json.dumps(aggregates, indent=2), encoding="utf-8")
    return 0


def _load_baseline(args):
    if args.activity or args.factors:
        if not (args.activity and args.factors and args.year):
            raise ValueError("--activity, --factors and --year must be given together")
        return build_baseline(load_activity_csv(args.activity), load_factors_csv(args.factors), args.year)
    if args.dataset != "houston-2014":
        raise ValueError(f"unknown bundled dataset {args.dataset!r}")
    return datasets.houston2014_baseline()


def _cmd_baseline(args) -> int:
    inventory = _load_baseline(args)
    summary = inventory_summary(inventory)
    print(json.dumps(summary, indent=2))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        dump_inventory_json(inventory, out / "inventory.json")
        geo = emissions_map_geojson(inventory, _zone_geometries_for(args))
        (out / "emissions_map.geojson").write_text(json.dumps(geo, indent=2), encoding="utf-8")
    return 0


def _zone_geometries_for(args):
    if getattr(args, "dataset", None) == "houston-2014" and not args.activity:
        return datasets.houston2014_zone_geometries()
    return None


def _cmd_scenario(args) -> int:
    if Path(args.spec).is_file():
        spec = load_scenario_spec(args.spec)
    else:
        spec = datasets.scenario_spec(args.spec)
    if args.baseline != "houston-2014":
        raise ValueError(f"unknown bundled baseline {args.baseline!r}")
    inventory = datasets.houston2014_baseline()
    base_pop = datasets.houston2014_meta()["base_population"]
    series = apply_scenario(inventory, spec, base_pop)
    if args.goals:
        from ..scenario import GoalSet

        goals = GoalSet.from_json_dict(json.loads(Path(args.goals).read_text(encoding="utf-8")))
    else:
        goals = datasets.default_goals()
    report = check_goals(series, goals)
    print(f"scenario {spec.name}: 2050 reduction {series.reduction(2050):.3f}")
    for r in report:
        flag = "PASS" if r.passed else "FAIL"
        print(f"  [{flag}] {r.kind} {r.year}: required {r.required:.3f}, achieved {r.achieved:.3f}")
    payload = series.to_json_dict()
    payload["compliance"] = compliance_to_json_dict(report)
    if args.offsets:
        residual = series.emissions(2050)
        sizing = size_offsets(residual, datasets.default_offset_plan())
        payload["offsets_2050"] = sizing
        print(
            f"  2050 residual {residual:,.0f} MTCO2e -> {sizing['gwh_per_year']:,.0f} gWh/yr, "
            f"{sizing['square_miles']:.1f} sq mi solar"
        )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{spec.name}_series.json").write_text(json.dumps(payload, indent=2), encoding="utf-8")
        compliance_to_csv(report, out / f"{spec.name}_compliance.csv")
    return 0


def _cmd_equity(args) -> int:
    tracts = load_tracts_csv(args.tracts) if args.tracts else datasets.bundled_tracts()
    scores = compute_equity_index(tracts)
    terms = LoanTerms(apr=args.apr, term_months=args.term_months)
    report = affordability_gap(tracts, args.price, terms, args.incentive)
    print(f"tracts: {len(tracts)}")
    print(f"mean equity index: {sum(s.index for s in scores) / len(scores):.4f}")
    print(
        f"affordability: {report.fraction_affording:.2f} of tracts afford "
        f"price ${args.price:,.0f} minus ${args.incentive:,.0f} incentive"
    )
    if args.evs is not None and args.chargers is not None:
        ratio = charger_ratio(args.evs, args.chargers)
        print(f"charger ratio: {ratio.label} ({ratio.per_charger:.1f} EVs per public charger)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        scores_to_csv(scores, out / "equity_scores.csv")
        geometries = None if args.tracts else datasets.tract_geometries()
        (out / "equity.geojson").write_text(
            json.dumps(scores_to_geojson(scores, geometries), indent=2), encoding="utf-8"
        )
        (out / "affordability.json").write_text(
            json.dumps(
                {
                    "fraction_affording": report.fraction_affording,
                    "annual_payment": report.annual_payment,
                    "threshold_income": report.threshold_income,
                    "per_tract": dict(report.affords),
                },
                indent=2,
            ),
            encoding="utf-8",
        )
    return 0


def _resolve_levers(ref: str | None) -> PolicyLevers | None:
    if not ref:
        return None
    path = Path(ref)
    if path.is_file():
        raw = json.loads(path.read_text(encoding="utf-8"))
    else:
        raw = datasets.lever_preset(ref)
    return PolicyLevers().merged(raw)


def _cmd_simulate(args) -> int:
    from ..mobsim.engine import simulate_day

    world = load_world_by_ref(args.world)
    levers = _resolve_levers(args.levers)
    result = simulate_day(
        world,
        levers,
        datasets.houston2014_factors(),
        seed=args.seed,
        n_agents=args.agents,
        tracts=bundled_tract_map(),
    )
    shares = ", ".join(f"{k}={v:.3f}" for k, v in sorted(result.mode_shares.items()))
    print(f"world {world.name} seed {args.seed}: {result.trips_completed} trips")
    print(f"mode shares: {shares}")
    print(f"vehicle VMT {result.vehicle_vmt:,.0f} mi, bus VMT {result.bus_vmt:,.0f} mi")
    print(f"emissions {result.total_mtco2e:.3f} MTCO2e")
    print(f"result hash {result.result_hash()}")
    if args.out:
        _write_result_bundle(result, world, Path(args.out), args.include_choices)
    return 0


def _write_result_bundle(result, world, out: Path, include_choices: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(
        json.dumps(result.to_json_dict(include_choices=include_choices), indent=2), encoding="utf-8"
    )
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        writer.writerow(["seed", result.seed])
        writer.writerow(["trips_completed", result.trips_completed])
        writer.writerow(["vehicle_vmt", f"{result.vehicle_vmt:.3f}"])
        writer.writerow(["bus_vmt", f"{result.bus_vmt:.3f}"])
        writer.writerow(["total_mtco2e", f"{result.total_mtco2e:.6f}"])
        for mode, share in sorted(result.mode_shares.items()):
            writer.writerow([f"share_{mode}", f"{share:.6f}"])
    with open(out / "hubs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if result.hub_stats:
            writer.writerow(list(result.hub_stats[0].keys()))
            for h in result.hub_stats:
                writer.writerow(list(h.values()))
    features = []
    for (zone, hour), value in sorted(result.zone_hour_mtco2e.items()):
        features.append(
            {
                "type": "Feature",
                "geometry": world.zone_geometries.get(zone),
                "properties": {"zone": zone, "hour": hour, "mtco2e": value},
            }
        )
    (out / "emissions_grid.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": features}, indent=2), encoding="utf-8"
    )


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config, flags={"host": args.host, "port": args.port})
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def _cmd_export(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.what == "dataset":
        name = args.name or "houston-2014"
        if name != "houston-2014":
            raise ValueError(f"unknown dataset {name!r}")
        shutil.copytree(datasets.data_path("houston2014"), out / "houston2014", dirs_exist_ok=True)
    elif args.what == "world":
        name = args.name or "demo"
        shutil.copytree(datasets.world_dir(name), out / name, dirs_exist_ok=True)
    elif args.what == "scenario":
        name = args.name or "scenario4"
        shutil.copy(datasets.data_path("scenarios", f"{name}.json"), out / f"{name}.json")
    elif args.what == "matrix":
        shutil.copy(datasets.data_path("intermodal_matrix.json"), out / "intermodal_matrix.json")
    elif args.what == "tracts":
        shutil.copytree(datasets.data_path("tracts"), out / "tracts", dirs_exist_ok=True)
    print(f"exported {args.what} to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
