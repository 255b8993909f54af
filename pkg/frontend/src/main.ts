// Browser entry point: wire the lever panel, dashboard, and scenario
// overlay against a gateway. Query params: ?api=http://host:port
// (default same origin), ?world=demo, ?seed=7.

import { GatewayClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { LeverPanelState, renderLeverPanel } from "./leverPanel.js";
import { compareScenarios } from "./scenarioCompare.js";
import type { LeverValues } from "./types.js";

const DEFAULT_LEVERS: LeverValues = {
  congestion_price: 0,
  ev_incentive_usd: 0,
  transit_headway_multiplier: 1,
  parking_search_minutes: 5,
  charger_ports_added: 0,
};

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const apiBase = params.get("api") ?? "";
  const world = params.get("world") ?? "demo";
  const seed = Number(params.get("seed") ?? "7");

  const client = new GatewayClient(apiBase);
  const root = document.getElementById("dashboard")!;
  const leverRoot = document.getElementById("levers")!;
  const compareRoot = document.getElementById("compare")!;

  const dashboard = new Dashboard(root, client);
  await dashboard.loadZones(world);

  const { bounds } = await client.getLeverBounds();
  const panel = new LeverPanelState(bounds, DEFAULT_LEVERS);

  const run = await client.createRun({ world, seed, cadence: 60 });
  const handles = renderLeverPanel(leverRoot, panel, async () => {
    if (!panel.hasPending()) return;
    handles.statusEl.textContent = "submitting...";
    try {
      const ack = await panel.submit(client, run.run_id);
      handles.statusEl.textContent = `awaiting snapshot ${ack.snapshot_id}`;
    } catch (err) {
      handles.statusEl.textContent = `rejected: ${String(err)}`;
    }
  });
  dashboard.attachLeverPanel(panel, handles);

  void compareScenarios(compareRoot, client, [
    "bau",
    "scenario1",
    "scenario2",
    "scenario3",
    "scenario4",
  ]);

  await client.startRun(run.run_id);
  await dashboard.connectAndRender(run.run_id);
}

if (typeof window !== "undefined" && document.getElementById("dashboard")) {
  boot().catch((err) => {
    const status = document.querySelector<HTMLElement>(".dash-status") ?? document.body;
    status.textContent = `console failed to start: ${String(err)}`;
  });
}
