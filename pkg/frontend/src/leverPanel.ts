// Policy lever panel: edits are clamped to service-declared bounds, queued
// as pending, submitted as a PATCH, and cleared when a snapshot carrying
// the acknowledged lever snapshot id arrives.

import type { GatewayClient } from "./api.js";
import type { LeverBounds, LeverSnapshotAck, LeverValues, SnapshotFrame } from "./types.js";

export class LeverPanelState {
  current: LeverValues;
  pending: Partial<LeverValues> = {};
  lastAckSnapshotId = 0;
  private awaiting: number | null = null;

  constructor(
    readonly bounds: LeverBounds,
    initial: LeverValues,
  ) {
    this.current = { ...initial };
  }

  /** Clamp to bounds and quantize to the declared step; returns the value
   * actually recorded, so out-of-range submissions are impossible. */
  edit(name: keyof LeverValues, value: number): number {
    const bound = this.bounds[name];
    let v = value;
    if (bound) {
      v = Math.min(bound.max, Math.max(bound.min, v));
      if (bound.step > 0) {
        v = Math.round((v - bound.min) / bound.step) * bound.step + bound.min;
        v = Math.min(bound.max, Math.max(bound.min, v));
        v = Number(v.toFixed(9)); // keep step arithmetic presentable
      }
    }
    if (v === this.current[name]) {
      delete this.pending[name];
    } else {
      this.pending[name] = v;
    }
    return v;
  }

  hasPending(): boolean {
    return Object.keys(this.pending).length > 0;
  }

  effectiveValues(): LeverValues {
    return { ...this.current, ...this.pending };
  }

  async submit(client: GatewayClient, runId: string, requestId?: string): Promise<LeverSnapshotAck> {
    const changes: Record<string, number> = {};
    for (const [key, value] of Object.entries(this.pending)) {
      if (value !== undefined) changes[key] = value;
    }
    const ack = await client.patchLevers(runId, changes, requestId);
    this.awaiting = ack.snapshot_id;
    return ack;
  }

  /** Called for every rendered frame; pending clears once the stream echoes
   * the awaited lever snapshot id. */
  acknowledge(frame: SnapshotFrame): boolean {
    if (this.awaiting !== null && frame.lever_snapshot_id >= this.awaiting) {
      this.current = { ...frame.levers };
      this.pending = {};
      this.lastAckSnapshotId = frame.lever_snapshot_id;
      this.awaiting = null;
      return true;
    }
    this.lastAckSnapshotId = Math.max(this.lastAckSnapshotId, frame.lever_snapshot_id);
    return false;
  }
}

const LEVER_LABELS: Record<keyof LeverValues, string> = {
  congestion_price: "Congestion price ($/trip)",
  ev_incentive_usd: "EV incentive ($)",
  transit_headway_multiplier: "Transit headway x",
  parking_search_minutes: "Parking search (min)",
  charger_ports_added: "Charger ports added",
};

export interface LeverPanelHandles {
  sliders: Map<string, HTMLInputElement>;
  applyButton: HTMLButtonElement;
  statusEl: HTMLElement;
}

export function renderLeverPanel(
  container: HTMLElement,
  state: LeverPanelState,
  onApply: () => void,
): LeverPanelHandles {
  container.innerHTML = "";
  container.classList.add("lever-panel");
  const sliders = new Map<string, HTMLInputElement>();

  for (const name of Object.keys(LEVER_LABELS) as (keyof LeverValues)[]) {
    const bound = state.bounds[name];
    if (!bound) continue;
    const row = document.createElement("div");
    row.className = "lever-row";

    const label = document.createElement("label");
    label.textContent = LEVER_LABELS[name];
    label.htmlFor = `lever-${name}`;

    const slider = document.createElement("input");
    slider.type = "range";
    slider.id = `lever-${name}`;
    slider.min = String(bound.min);
    slider.max = String(bound.max);
    slider.step = String(bound.step);
    slider.value = String(state.current[name]);

    const value = document.createElement("span");
    value.className = "lever-value";
    value.dataset.lever = name;
    value.textContent = String(state.current[name]);

    slider.addEventListener("input", () => {
      const applied = state.edit(name, Number(slider.value));
      slider.value = String(applied);
      value.textContent = String(applied);
      statusEl.textContent = state.hasPending() ? "pending edits" : "in sync";
    });

    row.append(label, slider, value);
    container.append(row);
    sliders.set(name, slider);
  }

  const applyButton = document.createElement("button");
  applyButton.textContent = "Apply levers";
  applyButton.className = "lever-apply";
  applyButton.addEventListener("click", onApply);

  const statusEl = document.createElement("div");
  statusEl.className = "lever-status";
  statusEl.textContent = "in sync";

  container.append(applyButton, statusEl);
  return { sliders, applyButton, statusEl };
}

export function reflectAcknowledgment(handles: LeverPanelHandles, state: LeverPanelState): void {
  for (const [name, slider] of handles.sliders) {
    const v = state.current[name as keyof LeverValues];
    slider.value = String(v);
    const valueEl = slider.parentElement?.querySelector<HTMLElement>(".lever-value");
    if (valueEl) valueEl.textContent = String(v);
  }
  handles.statusEl.textContent = state.hasPending() ? "pending edits" : "in sync";
}
