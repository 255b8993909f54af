import { describe, expect, it } from "vitest";

import { linePath, makeScale, renderBarRow, renderLineChart, renderStatTile } from "../src/charts.js";
import { colorFor, renderChoropleth } from "../src/choropleth.js";
import type { FeatureCollection } from "../src/types.js";

describe("scales and paths", () => {
  it("maps the domain linearly onto the range", () => {
    const s = makeScale([0, 10], [0, 100]);
    expect(s(0)).toBe(0);
    expect(s(5)).toBe(50);
    expect(s(10)).toBe(100);
  });

  it("degenerate domain collapses to the range midpoint", () => {
    const s = makeScale([5, 5], [0, 100]);
    expect(s(5)).toBe(50);
  });

  it("builds an M/L path over scaled points", () => {
    const sx = makeScale([0, 2], [0, 20]);
    const sy = makeScale([0, 10], [100, 0]);
    expect(linePath([0, 1, 2], [0, 5, 10], sx, sy)).toBe("M0.00,100.00 L10.00,50.00 L20.00,0.00");
  });
});

describe("renderLineChart", () => {
  it("renders one path per series with last values recorded", () => {
    const host = document.createElement("div");
    renderLineChart(host, [
      { label: "a", xs: [0, 1], ys: [1, 2], color: "#111" },
      { label: "b", xs: [0, 1], ys: [3, 4], color: "#222" },
    ]);
    const paths = host.querySelectorAll("path.series-line");
    expect(paths).toHaveLength(2);
    expect((paths[1] as SVGPathElement).dataset.last).toBe("4");
  });

  it("draws milestone bands with raw values", () => {
    const host = document.createElement("div");
    renderLineChart(host, [{ label: "a", xs: [2020, 2050], ys: [0, 0.8], color: "#111" }], {
      bands: [
        { y: 0.33, label: "33%" },
        { y: 0.7, label: "70%" },
      ],
    });
    const bands = host.querySelectorAll("line.milestone-band");
    expect(bands).toHaveLength(2);
    expect((bands[1] as SVGLineElement).dataset.value).toBe("0.7");
  });
});

describe("stat tiles and bars", () => {
  it("stores raw values in data attributes and updates in place", () => {
    const host = document.createElement("div");
    renderStatTile(host, "MTCO2e", 12.345678, "total_mtco2e", (v) => v.toFixed(2));
    renderStatTile(host, "MTCO2e", 20.5, "total_mtco2e", (v) => v.toFixed(2));
    const tiles = host.querySelectorAll(".stat-tile");
    expect(tiles).toHaveLength(1);
    expect((tiles[0] as HTMLElement).dataset.value).toBe("20.5");
    expect(tiles[0].querySelector(".stat-value")!.textContent).toBe("20.50");
  });

  it("bar rows carry exact fractions", () => {
    const host = document.createElement("div");
    renderBarRow(host, "DriveGas", 0.64523, "mode_shares.DriveGas", "#123");
    const row = host.querySelector<HTMLElement>(".bar-row")!;
    expect(row.dataset.value).toBe("0.64523");
    expect(row.querySelector(".bar-pct")!.textContent).toBe("64.5%");
  });
});

describe("choropleth", () => {
  const geojson: FeatureCollection = {
    type: "FeatureCollection",
    features: [
      {
        type: "Feature",
        geometry: { type: "Polygon", coordinates: [[[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]] },
        properties: { zone: "z01" },
      },
      {
        type: "Feature",
        geometry: { type: "Polygon", coordinates: [[[1, 0], [2, 0], [2, 1], [1, 1], [1, 0]]] },
        properties: { zone: "z02" },
      },
    ],
  };

  it("renders one polygon per feature with raw values", () => {
    const host = document.createElement("div");
    const values: Record<string, number> = { z01: 1.25, z02: 4.5 };
    renderChoropleth(host, geojson, (f) => values[String(f.properties.zone)] ?? null, {
      idProperty: "zone",
      valuePathPrefix: "zone_mtco2e",
    });
    const polys = host.querySelectorAll("polygon");
    expect(polys).toHaveLength(2);
    expect((polys[0] as SVGPolygonElement).dataset.value).toBe("1.25");
    expect((polys[1] as SVGPolygonElement).dataset.path).toBe("zone_mtco2e.z02");
  });

  it("color scale darkens with value", () => {
    const low = colorFor(0, 0, 1);
    const high = colorFor(1, 0, 1);
    const channel = (c: string) => Number(c.slice(4).split(",")[0]);
    expect(channel(high)).toBeLessThan(channel(low));
  });
});
