// Minimal dependency-free SVG charts. Raw values always land in data-value
// / data-path attributes so tests can diff the DOM against the API.

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Scale {
  (v: number): number;
}

export function makeScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function linePath(xs: number[], ys: number[], sx: Scale, sy: Scale): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${sx(xs[i]).toFixed(2)},${sy(ys[i]).toFixed(2)}`);
  }
  return parts.join(" ");
}

export interface LineSeries {
  label: string;
  xs: number[];
  ys: number[];
  color: string;
}

export interface Band {
  y: number;
  label: string;
}

export interface LineChartOptions {
  width?: number;
  height?: number;
  bands?: Band[];
  yDomain?: [number, number];
  title?: string;
}

export function renderLineChart(
  container: HTMLElement,
  series: LineSeries[],
  options: LineChartOptions = {},
): SVGSVGElement {
  const width = options.width ?? 460;
  const height = options.height ?? 200;
  const pad = 34;
  container.innerHTML = "";
  if (options.title) {
    const h = document.createElement("h3");
    h.textContent = options.title;
    container.append(h);
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "line-chart");

  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys).concat((options.bands ?? []).map((b) => b.y));
  if (allX.length === 0) {
    container.append(svg);
    return svg;
  }
  const xDomain: [number, number] = [Math.min(...allX), Math.max(...allX)];
  const yDomain: [number, number] =
    options.yDomain ?? [Math.min(...allY, 0), Math.max(...allY) * 1.05 || 1];
  const sx = makeScale(xDomain, [pad, width - 8]);
  const sy = makeScale(yDomain, [height - 20, 8]);

  for (const band of options.bands ?? []) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(pad));
    line.setAttribute("x2", String(width - 8));
    line.setAttribute("y1", sy(band.y).toFixed(2));
    line.setAttribute("y2", sy(band.y).toFixed(2));
    line.setAttribute("class", "milestone-band");
    line.setAttribute("stroke-dasharray", "4 3");
    line.setAttribute("stroke", "#888");
    line.dataset.band = band.label;
    line.dataset.value = String(band.y);
    svg.append(line);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(width - 6));
    text.setAttribute("y", (sy(band.y) - 2).toFixed(2));
    text.setAttribute("text-anchor", "end");
    text.setAttribute("class", "band-label");
    text.textContent = band.label;
    svg.append(text);
  }

  for (const s of series) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", linePath(s.xs, s.ys, sx, sy));
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", s.color);
    path.setAttribute("stroke-width", "1.8");
    path.setAttribute("class", "series-line");
    path.dataset.series = s.label;
    if (s.ys.length > 0) path.dataset.last = String(s.ys[s.ys.length - 1]);
    svg.append(path);
  }
  container.append(svg);
  return svg;
}

export function renderStatTile(
  container: HTMLElement,
  label: string,
  value: number | string,
  path: string,
  format?: (v: number) => string,
): HTMLElement {
  let tile = container.querySelector<HTMLElement>(`[data-path="${path}"]`);
  if (!tile) {
    tile = document.createElement("div");
    tile.className = "stat-tile";
    tile.dataset.path = path;
    const name = document.createElement("div");
    name.className = "stat-label";
    name.textContent = label;
    const val = document.createElement("div");
    val.className = "stat-value";
    tile.append(name, val);
    container.append(tile);
  }
  const valueEl = tile.querySelector<HTMLElement>(".stat-value")!;
  tile.dataset.value = String(value);
  valueEl.textContent =
    typeof value === "number" && format ? format(value) : String(value);
  return tile;
}

export function renderBarRow(
  container: HTMLElement,
  label: string,
  fraction: number,
  path: string,
  color: string,
): HTMLElement {
  let row = container.querySelector<HTMLElement>(`[data-path="${path}"]`);
  if (!row) {
    row = document.createElement("div");
    row.className = "bar-row";
    row.dataset.path = path;
    const name = document.createElement("span");
    name.className = "bar-label";
    name.textContent = label;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.background = color;
    track.append(fill);
    const pct = document.createElement("span");
    pct.className = "bar-pct";
    row.append(name, track, pct);
    container.append(row);
  }
  row.dataset.value = String(fraction);
  row.querySelector<HTMLElement>(".bar-fill")!.style.width = `${(fraction * 100).toFixed(1)}%`;
  row.querySelector<HTMLElement>(".bar-pct")!.textContent = `${(fraction * 100).toFixed(1)}%`;
  return row;
}
