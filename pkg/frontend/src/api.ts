import type {
  EvaluateResponse,
  EquityScoreRow,
  FeatureCollection,
  LeverBounds,
  LeverSnapshotAck,
  RunHandle,
  SnapshotFrame,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // body was not JSON; keep defaults
  }
  return new ApiError(response.status, code, message);
}

export class GatewayClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.url(path), {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  getBaseline(): Promise<Record<string, unknown>> {
    return this.json("/v1/baseline");
  }

  evaluateScenarios(specs: string[]): Promise<EvaluateResponse> {
    return this.json("/v1/scenarios/evaluate", {
      method: "POST",
      body: JSON.stringify({ specs }),
    });
  }

  getEquityScores(): Promise<{ scores: EquityScoreRow[] }> {
    return this.json("/v1/equity/tracts");
  }

  getEquityGeojson(): Promise<FeatureCollection> {
    return this.json("/v1/equity/tracts?format=geojson");
  }

  getLeverBounds(): Promise<{ bounds: LeverBounds }> {
    return this.json("/v1/levers/bounds");
  }

  getWorldZones(world: string): Promise<FeatureCollection> {
    return this.json(`/v1/worlds/${world}/zones.geojson`);
  }

  createRun(body: {
    world?: string;
    seed?: number;
    n_agents?: number;
    cadence?: number;
    levers?: Record<string, number>;
    request_id?: string;
  }): Promise<RunHandle> {
    return this.json("/v1/runs", { method: "POST", body: JSON.stringify(body) });
  }

  getRun(runId: string): Promise<RunHandle> {
    return this.json(`/v1/runs/${runId}`);
  }

  startRun(runId: string): Promise<RunHandle> {
    return this.json(`/v1/runs/${runId}/start`, { method: "POST", body: "{}" });
  }

  pauseRun(runId: string): Promise<RunHandle> {
    return this.json(`/v1/runs/${runId}/pause`, { method: "POST", body: "{}" });
  }

  patchLevers(
    runId: string,
    changes: Record<string, number>,
    requestId?: string,
  ): Promise<LeverSnapshotAck> {
    return this.json(`/v1/runs/${runId}/levers`, {
      method: "PATCH",
      body: JSON.stringify({ changes, request_id: requestId }),
    });
  }

  getSnapshots(runId: string, since: number, waitS = 0): Promise<{ state: string; snapshots: SnapshotFrame[] }> {
    return this.json(`/v1/runs/${runId}/snapshots?since=${since}&wait_s=${waitS}`);
  }

  getResult(runId: string): Promise<Record<string, unknown>> {
    return this.json(`/v1/runs/${runId}/result`);
  }

  streamUrl(runId: string, fromTick?: number): string {
    const suffix = fromTick === undefined ? "" : `?from_tick=${fromTick}`;
    return this.url(`/v1/runs/${runId}/stream${suffix}`);
  }
}
