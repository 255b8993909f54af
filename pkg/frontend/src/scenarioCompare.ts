// Scenario comparison overlay: reduction curves from /v1/scenarios/evaluate
// rendered verbatim against the milestone bands.

import { ApiError, GatewayClient } from "./api.js";
import { renderLineChart } from "./charts.js";
import type { ScenarioSeries } from "./types.js";

const SCENARIO_COLORS: Record<string, string> = {
  bau: "#555555",
  scenario1: "#b5452c",
  scenario2: "#b5a12c",
  scenario3: "#2cb56e",
  scenario4: "#2c7db5",
};

export const MILESTONE_BANDS = [
  { y: 0.33, label: "33% by 2030" },
  { y: 0.58, label: "58% by 2040" },
  { y: 0.7, label: "70% by 2050" },
];

export function renderErrorCard(container: HTMLElement, message: string): HTMLElement {
  const card = document.createElement("div");
  card.className = "error-card";
  card.textContent = message;
  container.append(card);
  return card;
}

export async function compareScenarios(
  container: HTMLElement,
  client: GatewayClient,
  specIds: string[],
): Promise<ScenarioSeries[]> {
  container.innerHTML = "";
  let results: ScenarioSeries[];
  try {
    const response = await client.evaluateScenarios(specIds);
    results = response.results;
  } catch (err) {
    if (err instanceof ApiError) {
      renderErrorCard(container, `scenario evaluation failed: ${err.message}`);
      return [];
    }
    throw err;
  }

  const chartHost = document.createElement("div");
  chartHost.className = "scenario-chart";
  container.append(chartHost);
  renderLineChart(
    chartHost,
    results.map((r) => ({
      label: r.name,
      xs: r.years,
      ys: r.reduction,
      color: SCENARIO_COLORS[r.name] ?? "#999",
    })),
    {
      title: "Reduction vs baseline",
      bands: MILESTONE_BANDS,
      yDomain: [-0.5, 1.0],
      height: 240,
      width: 560,
    },
  );

  const legend = document.createElement("div");
  legend.className = "scenario-legend";
  for (const r of results) {
    const value2050 = r.emissions_mtco2e[r.years.indexOf(2050)];
    const reduction2050 = r.reduction[r.years.indexOf(2050)];
    const entry = document.createElement("div");
    entry.className = "legend-entry";
    entry.dataset.scenario = r.name;
    entry.dataset.path = `${r.name}.emissions_2050`;
    entry.dataset.value = String(value2050);
    entry.dataset.reduction = String(reduction2050);
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.background = SCENARIO_COLORS[r.name] ?? "#999";
    const text = document.createElement("span");
    text.textContent = `${r.name}: ${(reduction2050 * 100).toFixed(1)}% reduction by 2050`;
    entry.append(swatch, text);
    legend.append(entry);
  }
  container.append(legend);
  return results;
}
