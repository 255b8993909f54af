// Live dashboard: renders every snapshot frame verbatim. All domain numbers
// come from the gateway; the only client-side math is axis scaling and
// percent formatting for display copies (raw values sit in data-value).

import type { GatewayClient } from "./api.js";
import { renderBarRow, renderLineChart, renderStatTile } from "./charts.js";
import { renderChoropleth } from "./choropleth.js";
import { LeverPanelHandles, LeverPanelState, reflectAcknowledgment } from "./leverPanel.js";
import { streamSnapshots } from "./stream.js";
import type { FeatureCollection, HubStats, SnapshotFrame } from "./types.js";

const MODE_COLORS: Record<string, string> = {
  DriveGas: "#b5452c",
  DriveEV: "#2c7db5",
  ParkAndRide: "#7d2cb5",
  TransitDirect: "#2cb56e",
  Active: "#b5a12c",
};

export interface DashboardSections {
  stats: HTMLElement;
  emissionsChart: HTMLElement;
  vmtChart: HTMLElement;
  modeShares: HTMLElement;
  hubCards: HTMLElement;
  zoneMap: HTMLElement;
  gauge: HTMLElement;
  status: HTMLElement;
}

export function buildDashboardSkeleton(root: HTMLElement): DashboardSections {
  root.innerHTML = "";
  const make = (cls: string): HTMLElement => {
    const el = document.createElement("section");
    el.className = cls;
    root.append(el);
    return el;
  };
  return {
    status: make("dash-status"),
    stats: make("dash-stats"),
    gauge: make("dash-gauge"),
    modeShares: make("dash-mode-shares"),
    emissionsChart: make("dash-emissions"),
    vmtChart: make("dash-vmt"),
    hubCards: make("dash-hubs"),
    zoneMap: make("dash-zone-map"),
  };
}

export class Dashboard {
  readonly frames: SnapshotFrame[] = [];
  readonly sections: DashboardSections;
  private zones: FeatureCollection | null = null;
  leverPanel: LeverPanelState | null = null;
  leverHandles: LeverPanelHandles | null = null;

  constructor(
    root: HTMLElement,
    readonly client: GatewayClient,
  ) {
    this.sections = buildDashboardSkeleton(root);
  }

  async loadZones(world: string): Promise<void> {
    this.zones = await this.client.getWorldZones(world);
  }

  renderFrame(frame: SnapshotFrame): void {
    this.frames.push(frame);
    const s = this.sections;

    s.status.textContent = `run ${frame.run_id} — ${frame.state} — tick ${frame.tick}`;
    s.status.dataset.state = frame.state;
    s.status.dataset.tick = String(frame.tick);

    renderStatTile(s.stats, "Tick", frame.tick, "tick");
    renderStatTile(s.stats, "Trips started", frame.trips_started, "trips_started");
    renderStatTile(s.stats, "Trips completed", frame.trips_completed, "trips_completed");
    renderStatTile(s.stats, "Vehicle VMT", frame.vehicle_vmt, "vehicle_vmt", (v) => v.toFixed(1));
    renderStatTile(s.stats, "Bus VMT", frame.bus_vmt, "bus_vmt", (v) => v.toFixed(1));
    renderStatTile(s.stats, "MTCO2e", frame.total_mtco2e, "total_mtco2e", (v) => v.toFixed(4));
    renderStatTile(s.stats, "Lever snapshot", frame.lever_snapshot_id, "lever_snapshot_id");

    for (const [mode, share] of Object.entries(frame.mode_shares).sort()) {
      renderBarRow(s.modeShares, mode, share, `mode_shares.${mode}`, MODE_COLORS[mode] ?? "#777");
    }

    const ticks = this.frames.map((f) => f.tick);
    renderLineChart(
      this.sections.emissionsChart,
      [
        {
          label: "cumulative MTCO2e",
          xs: ticks,
          ys: this.frames.map((f) => f.total_mtco2e),
          color: "#b5452c",
        },
      ],
      { title: "Emissions (cumulative MTCO2e)" },
    );
    renderLineChart(
      this.sections.vmtChart,
      [
        { label: "vehicle VMT", xs: ticks, ys: this.frames.map((f) => f.vehicle_vmt), color: "#2c7db5" },
        { label: "bus VMT", xs: ticks, ys: this.frames.map((f) => f.bus_vmt), color: "#2cb56e" },
      ],
      { title: "VMT (cumulative miles)" },
    );

    this.renderHubs(frame.hubs);
    this.renderGauge(frame);
    if (this.zones) {
      renderChoropleth(
        s.zoneMap,
        this.zones,
        (feature) => {
          const zone = String(feature.properties.zone);
          const v = frame.zone_mtco2e[zone];
          return v === undefined ? null : v;
        },
        { idProperty: "zone", valuePathPrefix: "zone_mtco2e", title: "Zone emissions (MTCO2e)" },
      );
    }

    if (this.leverPanel) {
      const acked = this.leverPanel.acknowledge(frame);
      if (acked && this.leverHandles) reflectAcknowledgment(this.leverHandles, this.leverPanel);
    }
  }

  private renderHubs(hubs: HubStats[]): void {
    const container = this.sections.hubCards;
    hubs.forEach((hub, i) => {
      let card = container.querySelector<HTMLElement>(`[data-hub="${hub.hub_id}"]`);
      if (!card) {
        card = document.createElement("div");
        card.className = "hub-card";
        card.dataset.hub = hub.hub_id;
        const title = document.createElement("h4");
        title.textContent = hub.hub_id;
        card.append(title);
        for (const field of [
          "transfers",
          "peak_occupancy",
          "occupancy_end",
          "parking_denied",
          "charge_sessions_started",
          "charge_wait_mean_min",
        ]) {
          const row = document.createElement("div");
          row.className = "hub-stat";
          row.dataset.path = `hubs.${i}.${field}`;
          const label = document.createElement("span");
          label.textContent = field.replaceAll("_", " ");
          const value = document.createElement("span");
          value.className = "hub-value";
          row.append(label, value);
          card.append(row);
        }
        container.append(card);
      }
      for (const row of card.querySelectorAll<HTMLElement>(".hub-stat")) {
        const field = row.dataset.path!.split(".").pop()! as keyof HubStats;
        const raw = hub[field] as number;
        row.dataset.value = String(raw);
        row.querySelector<HTMLElement>(".hub-value")!.textContent =
          typeof raw === "number" && !Number.isInteger(raw) ? raw.toFixed(2) : String(raw);
      }
    });
  }

  private renderGauge(frame: SnapshotFrame): void {
    const container = this.sections.gauge;
    container.innerHTML = "<h3>Milestone gauge</h3>";
    const gauge = frame.milestone_gauge;
    const achieved = gauge.achieved_daily_reduction;
    for (const [year, required] of Object.entries(gauge.goals).sort()) {
      const badge = document.createElement("span");
      badge.className = "gauge-badge";
      badge.dataset.path = `milestone_gauge.goals.${year}`;
      badge.dataset.value = String(required);
      let text = `${year}: ${(required * 100).toFixed(0)}%`;
      if (achieved !== undefined && frame.final) {
        const ok = achieved >= required;
        badge.classList.add(ok ? "gauge-pass" : "gauge-fail");
        text += ok ? " PASS" : " MISS";
      }
      badge.textContent = text;
      container.append(badge);
    }
    if (achieved !== undefined) {
      const line = document.createElement("div");
      line.dataset.path = "milestone_gauge.achieved_daily_reduction";
      line.dataset.value = String(achieved);
      line.textContent = `daily reduction vs reference: ${(achieved * 100).toFixed(1)}%`;
      container.append(line);
    }
  }

  attachLeverPanel(state: LeverPanelState, handles: LeverPanelHandles): void {
    this.leverPanel = state;
    this.leverHandles = handles;
  }

  /** Subscribe to the run's snapshot stream and render every frame; the
   * stream delivers a catch-up frame on join and resumes from the last
   * tick on reconnect. */
  async connectAndRender(runId: string, fromTick?: number): Promise<SnapshotFrame | null> {
    let last: SnapshotFrame | null = null;
    for await (const frame of streamSnapshots(this.client, runId, {
      fromTick,
      onReconnect: (tick) => {
        this.sections.status.textContent = `reconnecting from tick ${tick}...`;
      },
    })) {
      this.renderFrame(frame);
      last = frame;
    }
    return last;
  }
}
