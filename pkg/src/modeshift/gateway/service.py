"""HTTP API (/v1): baseline, scenarios, equity, worlds, and live runs.

All responses are JSON; errors follow {code, message}. Snapshot streaming
is newline-delimited JSON frames; the same frames are available by
long-polling GET /runs/{id}/snapshots?since=.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from .. import datasets
from ..equity import LoanTerms, affordability_gap, charger_ratio, compute_equity_index, scores_to_geojson
from ..inventory import emissions_map_geojson, inventory_summary
from ..mobsim.world import InvalidLeverValue
from ..scenario import (
    GoalSet,
    ScenarioSpec,
    apply_scenario,
    check_goals,
    compliance_to_json_dict,
    project_bau,
)
from .config import GatewayConfig
from .runs import RunManager, RunState, TransitionError, UnknownRun


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class CreateRunBody(BaseModel):
    world: str = "demo"
    seed: int = 0
    levers: dict[str, float] | None = None
    cadence: int | None = Field(default=None, ge=1)
    n_agents: int | None = Field(default=None, ge=1)
    request_id: str | None = None


class ControlBody(BaseModel):
    request_id: str | None = None


class LeverPatchBody(BaseModel):
    changes: dict[str, float]
    effective_tick: int | None = Field(default=None, ge=0)
    request_id: str | None = None


class EvaluateBody(BaseModel):
    specs: list[Any] = Field(default_factory=lambda: list(datasets.SCENARIO_NAMES))
    goals: dict | None = None


def create_app(config: GatewayConfig | None = None) -> FastAPI:
    config = config or GatewayConfig()
    app = FastAPI(title="modeshift gateway", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    manager = RunManager(config)
    app.state.config = config
    app.state.runs = manager

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"code": "validation_error", "message": str(exc.errors())})

    def _run_or_404(run_id: str):
        try:
            return manager.get(run_id)
        except UnknownRun:
            raise ApiError(404, "unknown_run", f"no run {run_id!r}") from None

    # -- reference data ----------------------------------------------------

    @app.get("/v1/baseline")
    def baseline_summary(dataset: str = "houston-2014"):
        _require_houston(dataset)
        inv = datasets.houston2014_baseline()
        return inventory_summary(inv)

    @app.get("/v1/baseline/emissions-map.geojson")
    def baseline_map(dataset: str = "houston-2014"):
        _require_houston(dataset)
        inv = datasets.houston2014_baseline()
        return emissions_map_geojson(inv, datasets.houston2014_zone_geometries())

    @app.post("/v1/scenarios/evaluate")
    def evaluate_scenarios(body: EvaluateBody):
        inv = datasets.houston2014_baseline()
        base_pop = datasets.houston2014_meta()["base_population"]
        goals = GoalSet.from_json_dict(body.goals) if body.goals else datasets.default_goals()
        results = []
        for entry in body.specs:
            try:
                if isinstance(entry, str):
                    spec = datasets.scenario_spec(entry)
                else:
                    spec = ScenarioSpec.from_json_dict(entry)
            except (KeyError, ValueError) as exc:
                raise ApiError(422, "invalid_spec", f"{entry!r}: {exc}") from None
            series = apply_scenario(inv, spec, base_pop)
            payload = series.to_json_dict()
            payload["compliance"] = compliance_to_json_dict(check_goals(series, goals))
            results.append(payload)
        return {"baseline_total": inv.total_mtco2e, "results": results}

    @app.get("/v1/scenarios")
    def list_scenarios():
        return {"scenarios": list(datasets.SCENARIO_NAMES)}

    @app.get("/v1/equity/tracts")
    def equity_tracts(format: str = Query(default="json", pattern="^(json|geojson)$")):
        tracts = datasets.bundled_tracts()
        scores = compute_equity_index(tracts)
        if format == "geojson":
            return scores_to_geojson(scores, datasets.tract_geometries())
        return {
            "scores": [
                {"tract_id": s.tract_id, "internal": s.internal, "external": s.external, "index": s.index}
                for s in scores
            ]
        }

    @app.get("/v1/equity/affordability")
    def equity_affordability(
        price: float = 55_000.0,
        incentive: float = 0.0,
        apr: float = 0.07,
        term_months: int = 60,
    ):
        tracts = datasets.bundled_tracts()
        try:
            report = affordability_gap(tracts, price, LoanTerms(apr=apr, term_months=term_months), incentive)
        except ValueError as exc:
            raise ApiError(422, "invalid_terms", str(exc)) from None
        return {
            "fraction_affording": report.fraction_affording,
            "annual_payment": report.annual_payment,
            "threshold_income": report.threshold_income,
        }

    @app.get("/v1/equity/charger-ratio")
    def equity_charger_ratio(evs: float, chargers: float):
        try:
            ratio = charger_ratio(evs, chargers)
        except ValueError as exc:
            raise ApiError(422, "invalid_counts", str(exc)) from None
        return {"per_charger": ratio.per_charger, "label": ratio.label}

    @app.get("/v1/levers/bounds")
    def lever_bounds():
        return {"bounds": dict(config.lever_bounds)}

    @app.get("/v1/worlds/{name}/zones.geojson")
    def world_zones(name: str):
        try:
            world = _load_world(name)
        except Exception as exc:
            raise ApiError(404, "unknown_world", str(exc)) from None
        return {
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "geometry": world.zone_geometries.get(z.id),
                    "properties": {"zone": z.id, "population": z.population, "employment": z.employment},
                }
                for z in world.zones.values()
            ],
        }

    def _load_world(name: str):
        from .runs import load_world_by_ref

        return load_world_by_ref(name, config)

    # -- runs ----------------------------------------------------------------

    @app.post("/v1/runs", status_code=201)
    def create_run(body: CreateRunBody):
        try:
            run = manager.create(
                body.world,
                body.seed,
                levers=body.levers,
                cadence=body.cadence,
                n_agents=body.n_agents,
                request_id=body.request_id,
            )
        except InvalidLeverValue as exc:
            raise ApiError(422, "invalid_lever", str(exc)) from None
        except datasets.UnknownDataset as exc:
            raise ApiError(404, "unknown_world", str(exc)) from None
        return run.handle()

    @app.get("/v1/runs")
    def list_runs():
        return {"runs": manager.all_handles()}

    @app.get("/v1/runs/{run_id}")
    def get_run(run_id: str):
        return _run_or_404(run_id).handle()

    @app.post("/v1/runs/{run_id}/start")
    def start_run(run_id: str, body: ControlBody | None = None):
        run = _run_or_404(run_id)
        try:
            run.start(request_id=body.request_id if body else None)
        except TransitionError as exc:
            raise ApiError(409, "illegal_transition", str(exc)) from None
        return run.handle()

    @app.post("/v1/runs/{run_id}/pause")
    def pause_run(run_id: str, body: ControlBody | None = None):
        run = _run_or_404(run_id)
        try:
            run.pause(request_id=body.request_id if body else None)
        except TransitionError as exc:
            raise ApiError(409, "illegal_transition", str(exc)) from None
        return run.handle()

    @app.patch("/v1/runs/{run_id}/levers")
    def patch_levers(run_id: str, body: LeverPatchBody):
        _run_or_404(run_id)
        try:
            snap = manager.apply_levers(
                run_id, body.changes, effective_tick=body.effective_tick, request_id=body.request_id
            )
        except TransitionError as exc:
            raise ApiError(409, "illegal_transition", str(exc)) from None
        except InvalidLeverValue as exc:
            raise ApiError(422, "invalid_lever", str(exc)) from None
        return snap.to_dict()

    @app.get("/v1/runs/{run_id}/snapshots")
    def get_snapshots(run_id: str, since: int = -1, wait_s: float = Query(default=0.0, ge=0.0, le=30.0)):
        run = _run_or_404(run_id)
        if wait_s > 0:
            frames = run.wait_snapshots(since, wait_s)
        else:
            frames = run.snapshots_since(since)
        return {"run_id": run_id, "state": run.state.value, "snapshots": frames}

    @app.get("/v1/runs/{run_id}/stream")
    def stream_run(run_id: str, from_tick: int | None = None):
        run = _run_or_404(run_id)

        def _frames():
            for frame in run.stream_frames(from_tick):
                yield json.dumps(frame, sort_keys=True) + "\n"

        return StreamingResponse(_frames(), media_type="application/x-ndjson")

    @app.get("/v1/runs/{run_id}/result")
    def run_result(run_id: str, include_choices: bool = False):
        run = _run_or_404(run_id)
        if run.state is not RunState.COMPLETED or run.result is None:
            raise ApiError(409, "not_completed", f"run {run_id} is {run.state.value}")
        return run.result.to_json_dict(include_choices=include_choices)

    return app


def _require_houston(dataset: str) -> None:
    if dataset != "houston-2014":
        raise ApiError(404, "unknown_dataset", f"no bundled dataset {dataset!r}")
