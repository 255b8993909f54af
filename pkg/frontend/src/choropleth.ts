// SVG choropleth over GeoJSON polygons. Values render verbatim into
// data-value attributes; only the fill color is derived client-side.

import type { FeatureCollection, GeoFeature } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function colorFor(value: number, lo: number, hi: number): string {
  const t = hi > lo ? Math.min(1, Math.max(0, (value - lo) / (hi - lo))) : 0.5;
  // light amber to deep red
  const r = Math.round(255 - 80 * t);
  const g = Math.round(235 - 180 * t);
  const b = Math.round(205 - 170 * t);
  return `rgb(${r},${g},${b})`;
}

function ringPoints(
  ring: number[][],
  bbox: [number, number, number, number],
  width: number,
  height: number,
): string {
  const [minX, minY, maxX, maxY] = bbox;
  const sx = (x: number) => ((x - minX) / (maxX - minX || 1)) * (width - 4) + 2;
  const sy = (y: number) => height - (((y - minY) / (maxY - minY || 1)) * (height - 4) + 2);
  return ring.map(([x, y]) => `${sx(x).toFixed(1)},${sy(y).toFixed(1)}`).join(" ");
}

function geoBbox(features: GeoFeature[]): [number, number, number, number] {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const f of features) {
    if (!f.geometry) continue;
    for (const [x, y] of f.geometry.coordinates[0]) {
      if (x < minX) minX = x;
      if (y < minY) minY = y;
      if (x > maxX) maxX = x;
      if (y > maxY) maxY = y;
    }
  }
  return [minX, minY, maxX, maxY];
}

export interface ChoroplethOptions {
  width?: number;
  height?: number;
  idProperty: string;
  valuePathPrefix: string;
  title?: string;
}

export function renderChoropleth(
  container: HTMLElement,
  geojson: FeatureCollection,
  valueOf: (feature: GeoFeature) => number | null,
  options: ChoroplethOptions,
): SVGSVGElement {
  const width = options.width ?? 320;
  const height = options.height ?? 260;
  container.innerHTML = "";
  if (options.title) {
    const h = document.createElement("h3");
    h.textContent = options.title;
    container.append(h);
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "choropleth");

  const drawable = geojson.features.filter((f) => f.geometry);
  const values = drawable
    .map((f) => valueOf(f))
    .filter((v): v is number => v !== null && Number.isFinite(v));
  const lo = values.length ? Math.min(...values) : 0;
  const hi = values.length ? Math.max(...values) : 1;
  const bbox = geoBbox(drawable);

  for (const feature of drawable) {
    const id = String(feature.properties[options.idProperty]);
    const value = valueOf(feature);
    const polygon = document.createElementNS(SVG_NS, "polygon");
    polygon.setAttribute("points", ringPoints(feature.geometry!.coordinates[0], bbox, width, height));
    polygon.setAttribute("stroke", "#555");
    polygon.setAttribute("stroke-width", "0.5");
    polygon.setAttribute("fill", value === null ? "#eee" : colorFor(value, lo, hi));
    polygon.dataset.id = id;
    polygon.dataset.path = `${options.valuePathPrefix}.${id}`;
    if (value !== null) polygon.dataset.value = String(value);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${id}: ${value === null ? "n/a" : value}`;
    polygon.append(title);
    svg.append(polygon);
  }
  container.append(svg);
  return svg;
}
