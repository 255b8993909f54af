// End-to-end console tests against a real gateway process:
//   1. lever slider change issues a PATCH and its snapshot id echoes in the
//      stream within two cadence intervals,
//   2. every number rendered into the DOM equals the API value (data-path
//      walk against the final snapshot),
//   3. the scenario overlay reproduces the published 2050 ordering.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { Dashboard } from "../src/dashboard.js";
import { LeverPanelState, renderLeverPanel } from "../src/leverPanel.js";
import { compareScenarios } from "../src/scenarioCompare.js";
import type { LeverValues, SnapshotFrame } from "../src/types.js";

const PORT = 8900 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;
const CADENCE = 60;

let server: ChildProcess;

async function waitForGateway(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/v1/baseline`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("gateway did not become ready");
    await new Promise((r) => setTimeout(r, 150));
  }
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "modeshift.gateway.cli", "serve", "--port", String(PORT), "--host", "127.0.0.1"],
    {
      env: { ...process.env, MODESHIFT_TICK_MS: "2", MODESHIFT_CADENCE: String(CADENCE) },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  server.stderr?.on("data", () => {});
  await waitForGateway();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

const DEFAULT_LEVERS: LeverValues = {
  congestion_price: 0,
  ev_incentive_usd: 0,
  transit_headway_multiplier: 1,
  parking_search_minutes: 5,
  charger_ports_added: 0,
};

function resolvePath(obj: unknown, path: string): unknown {
  return path.split(".").reduce<unknown>((acc, key) => {
    if (acc === null || acc === undefined) return undefined;
    return (acc as Record<string, unknown>)[key];
  }, obj);
}

async function waitFor(predicate: () => boolean, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await new Promise((r) => setTimeout(r, 50));
  }
}

describe("console round trip", () => {
  it("lever change echoes within two cadence intervals and DOM matches API", async () => {
    const client = new GatewayClient(BASE);
    const root = document.createElement("div");
    document.body.append(root);
    const leverRoot = document.createElement("div");
    document.body.append(leverRoot);

    const dashboard = new Dashboard(root, client);
    await dashboard.loadZones("demo");

    const { bounds } = await client.getLeverBounds();
    const panel = new LeverPanelState(bounds, DEFAULT_LEVERS);

    const run = await client.createRun({ world: "demo", seed: 7, n_agents: 400, cadence: CADENCE });

    let ackId: number | null = null;
    const handles = renderLeverPanel(leverRoot, panel, () => {
      void panel.submit(client, run.run_id).then((ack) => {
        ackId = ack.snapshot_id;
      });
    });
    dashboard.attachLeverPanel(panel, handles);

    await client.startRun(run.run_id);
    const rendering = dashboard.connectAndRender(run.run_id);

    // steer mid-run through the actual UI surface: slider + apply button
    await waitFor(() => dashboard.frames.length >= 1);
    const tickAtEdit = dashboard.frames[dashboard.frames.length - 1].tick;
    const slider = handles.sliders.get("congestion_price")!;
    slider.value = "6";
    slider.dispatchEvent(new Event("input"));
    expect(panel.hasPending()).toBe(true);
    handles.applyButton.click();
    await waitFor(() => ackId !== null);

    const finalFrame = await rendering;
    expect(finalFrame).not.toBeNull();
    expect(finalFrame!.final).toBe(true);
    expect(finalFrame!.state).toBe("Completed");

    // echo: first frame carrying the acknowledged lever snapshot id arrives
    // within two cadence intervals of the edit
    const echo = dashboard.frames.find((f) => f.lever_snapshot_id >= (ackId as unknown as number));
    expect(echo, "no frame echoed the lever snapshot id").toBeDefined();
    expect(echo!.tick - tickAtEdit).toBeLessThanOrEqual(2 * CADENCE);
    expect(echo!.levers.congestion_price).toBe(6);

    // pending edits cleared on acknowledgment
    expect(panel.hasPending()).toBe(false);
    expect(panel.current.congestion_price).toBe(6);

    // DOM-vs-API: every data-path element equals the final API frame value
    const api = await client.getSnapshots(run.run_id, -1);
    const apiFinal = api.snapshots[api.snapshots.length - 1] as unknown as SnapshotFrame;
    expect(apiFinal.final).toBe(true);
    const elements = root.querySelectorAll<HTMLElement>("[data-path]");
    expect(elements.length).toBeGreaterThan(30);
    let checked = 0;
    for (const el of elements) {
      const path = el.dataset.path!;
      const apiValue = resolvePath(apiFinal, path);
      if (apiValue === undefined) continue; // path from an interim-only field
      expect(String(apiValue), `mismatch at ${path}`).toBe(el.dataset.value);
      checked += 1;
    }
    expect(checked).toBeGreaterThan(30);

    // snapshot cadence: 24 interim + 1 final over the 1440-tick day
    expect(api.snapshots.filter((f: { final?: boolean }) => !f.final)).toHaveLength(24);
    root.remove();
    leverRoot.remove();
  }, 120_000);

  it("paused run freezes the dashboard and queues lever edits", async () => {
    const client = new GatewayClient(BASE);
    const run = await client.createRun({ world: "demo", seed: 3, n_agents: 200, cadence: CADENCE });
    await client.startRun(run.run_id);
    await new Promise((r) => setTimeout(r, 300));
    await client.pauseRun(run.run_id);
    const atPause = await client.getSnapshots(run.run_id, -1);
    expect(atPause.state).toBe("Paused");

    // lever edits while paused are accepted and queue for the resume
    const { bounds } = await client.getLeverBounds();
    const panel = new LeverPanelState(bounds, DEFAULT_LEVERS);
    panel.edit("ev_incentive_usd", 4000);
    const ack = await panel.submit(client, run.run_id);
    expect(ack.snapshot_id).toBeGreaterThan(0);

    await new Promise((r) => setTimeout(r, 300));
    const stillPaused = await client.getSnapshots(run.run_id, -1);
    expect(stillPaused.snapshots.length).toBe(atPause.snapshots.length);

    await client.startRun(run.run_id);
    const deadline = Date.now() + 60_000;
    for (;;) {
      const handle = await client.getRun(run.run_id);
      if (handle.state === "Completed") break;
      if (Date.now() > deadline) throw new Error("run did not complete");
      await new Promise((r) => setTimeout(r, 100));
    }
    const done = await client.getSnapshots(run.run_id, -1);
    const final = done.snapshots[done.snapshots.length - 1];
    expect(final.levers.ev_incentive_usd).toBe(4000);
  }, 120_000);
});

describe("scenario comparison overlay", () => {
  it("reproduces the published 2050 ordering with verbatim values", async () => {
    const client = new GatewayClient(BASE);
    const host = document.createElement("div");
    document.body.append(host);
    const results = await compareScenarios(host, client, [
      "bau",
      "scenario1",
      "scenario2",
      "scenario3",
      "scenario4",
    ]);
    expect(results.map((r) => r.name)).toEqual([
      "bau",
      "scenario1",
      "scenario2",
      "scenario3",
      "scenario4",
    ]);

    const emissions2050: Record<string, number> = {};
    for (const r of results) {
      emissions2050[r.name] = r.emissions_mtco2e[r.years.indexOf(2050)];
    }
    expect(emissions2050.bau).toBeGreaterThan(emissions2050.scenario1);
    expect(emissions2050.scenario1).toBeGreaterThan(emissions2050.scenario2);
    expect(emissions2050.scenario2).toBeGreaterThan(emissions2050.scenario4);
    expect(emissions2050.scenario4).toBeGreaterThanOrEqual(emissions2050.scenario3);

    // DOM values are verbatim API values
    const api = await client.evaluateScenarios(["bau", "scenario1", "scenario2", "scenario3", "scenario4"]);
    for (const result of api.results) {
      const entry = host.querySelector<HTMLElement>(`[data-scenario="${result.name}"]`)!;
      const apiValue = result.emissions_mtco2e[result.years.indexOf(2050)];
      expect(entry.dataset.value).toBe(String(apiValue));
    }
    // milestone bands drawn at the three targets
    const bands = host.querySelectorAll("line.milestone-band");
    expect([...bands].map((b) => (b as SVGLineElement).dataset.value)).toEqual([
      "0.33",
      "0.58",
      "0.7",
    ]);
    host.remove();
  }, 60_000);

  it("renders an inline error card for a missing scenario", async () => {
    const client = new GatewayClient(BASE);
    const host = document.createElement("div");
    const results = await compareScenarios(host, client, ["not-a-scenario"]);
    expect(results).toEqual([]);
    expect(host.querySelector(".error-card")).not.toBeNull();
  });
});

describe("equity choropleth data", () => {
  it("serves 100 scored tract polygons for the dashboard", async () => {
    const client = new GatewayClient(BASE);
    const geo = await client.getEquityGeojson();
    expect(geo.features).toHaveLength(100);
    const scores = await client.getEquityScores();
    const byId = new Map(scores.scores.map((s) => [s.tract_id, s.index]));
    for (const feature of geo.features.slice(0, 10)) {
      const id = String(feature.properties.tract_id);
      expect(feature.properties.index).toBe(byId.get(id));
    }
  });
});
