/** Parallel-coordinates plot and per-edge property area charts (pure SVG). */

import { propertyColor } from "./color.js";
import { PROPERTY_KEYS, type ProfileJson } from "./types.js";

export interface PcpLayout {
  width: number;
  height: number;
  marginX: number;
  marginTop: number;
  marginBottom: number;
}

export const DEFAULT_LAYOUT: PcpLayout = {
  width: 960,
  height: 420,
  marginX: 48,
  marginTop: 20,
  marginBottom: 30,
};

export const SVG_NS = "http://www.w3.org/2000/svg";

/** X pixel of the k-th axis slot out of `count`. */
export function axisX(k: number, count: number, layout: PcpLayout = DEFAULT_LAYOUT): number {
  if (count <= 1) return layout.width / 2;
  const inner = layout.width - 2 * layout.marginX;
  return layout.marginX + (k * inner) / (count - 1);
}

/** Y pixel of a normalized value (1 at the top). */
export function valueY(value: number, layout: PcpLayout = DEFAULT_LAYOUT): number {
  const inner = layout.height - layout.marginTop - layout.marginBottom;
  return layout.marginTop + (1 - value) * inner;
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

export interface PcpOptions {
  layout?: PcpLayout;
  highlightRows?: Set<number>;
  /** Per-edge window profiles; drawn as area charts along each left axis. */
  profiles?: ProfileJson[];
}

/**
 * Area chart hugging a vertical axis: windows run along the axis (value
 * space), scores extend sideways toward the next axis.
 */
export function overlayAreaPath(
  series: (number | null)[],
  bounds: [number, number][],
  x: number,
  maxWidth: number,
  layout: PcpLayout = DEFAULT_LAYOUT,
): string {
  if (series.length === 0) return "";
  const points = series.map((value, k) => {
    const [lo, hi] = bounds[k];
    const y = valueY((lo + hi) / 2, layout);
    return `L ${x + (value ?? 0) * maxWidth},${y}`;
  });
  const first = bounds[0];
  const last = bounds[bounds.length - 1];
  const yStart = valueY((first[0] + first[1]) / 2, layout);
  const yEnd = valueY((last[0] + last[1]) / 2, layout);
  return `M ${x},${yStart} ${points.join(" ")} L ${x},${yEnd} Z`;
}

export function renderPcp(
  container: HTMLElement,
  dims: string[],
  rows: number[][],
  order: number[],
  opts: PcpOptions = {},
): SVGSVGElement {
  const layout = opts.layout ?? DEFAULT_LAYOUT;
  const highlight = opts.highlightRows ?? new Set<number>();
  container.textContent = "";
  const svg = svgEl("svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("class", "pcp");
  svg.setAttribute("preserveAspectRatio", "xMidYMid meet");

  rows.forEach((row, rowIdx) => {
    const points = order
      .map((axis, k) => `${axisX(k, order.length, layout)},${valueY(row[axis], layout)}`)
      .join(" ");
    const line = svgEl("polyline");
    line.setAttribute("points", points);
    line.setAttribute(
      "class",
      highlight.has(rowIdx) ? "pcp-line pcp-highlight" : "pcp-line",
    );
    line.setAttribute("data-row", String(rowIdx));
    svg.appendChild(line);
  });

  order.forEach((axis, k) => {
    const x = axisX(k, order.length, layout);
    const axisLine = svgEl("line");
    axisLine.setAttribute("x1", String(x));
    axisLine.setAttribute("x2", String(x));
    axisLine.setAttribute("y1", String(layout.marginTop));
    axisLine.setAttribute("y2", String(layout.height - layout.marginBottom));
    axisLine.setAttribute("class", "pcp-axis");
    axisLine.setAttribute("data-axis", String(axis));
    svg.appendChild(axisLine);

    const text = svgEl("text");
    text.setAttribute("x", String(x));
    text.setAttribute("y", String(layout.height - 8));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("class", "pcp-axis-label");
    text.textContent = dims[axis] ?? `#${axis}`;
    svg.appendChild(text);
  });

  // Window-score area charts hugging the left axis of each adjacent pair.
  const profiles = opts.profiles ?? [];
  const slot =
    order.length > 1
      ? (layout.width - 2 * layout.marginX) / (order.length - 1)
      : layout.width - 2 * layout.marginX;
  const maxWidth = 0.35 * slot;
  for (let k = 0; k + 1 < order.length; k++) {
    const profile = profiles.find(
      (p) => p.pair[0] === order[k] && p.pair[1] === order[k + 1],
    );
    if (!profile) continue;
    const x = axisX(k, order.length, layout);
    for (const key of PROPERTY_KEYS) {
      const series = profile.per_property[key];
      if (!series || !series.some((v) => (v ?? 0) > 0.02)) continue;
      const path = svgEl("path");
      path.setAttribute(
        "d",
        overlayAreaPath(series, profile.window_bounds, x, maxWidth, layout),
      );
      path.setAttribute("fill", propertyColor(key));
      path.setAttribute("fill-opacity", "0.3");
      path.setAttribute("class", "pcp-area");
      path.setAttribute("data-property", key);
      path.setAttribute("data-pair", `${profile.pair[0]}-${profile.pair[1]}`);
      svg.appendChild(path);
    }
  }

  container.appendChild(svg);
  return svg;
}

/** Area-path data for one property series over its window bounds. */
export function areaPath(
  series: (number | null)[],
  bounds: [number, number][],
  width: number,
  height: number,
): string {
  const points: [number, number][] = series.map((value, k) => {
    const [lo, hi] = bounds[k];
    return [((lo + hi) / 2) * width, (1 - (value ?? 0)) * height];
  });
  if (points.length === 0) return "";
  const first = points[0];
  const last = points[points.length - 1];
  const middle = points.map(([x, y]) => `L ${x},${y}`).join(" ");
  return `M ${first[0]},${height} ${middle} L ${last[0]},${height} Z`;
}

/** One small multiples chart per consecutive pair: score areas per property. */
export function renderEdgeProfiles(
  container: HTMLElement,
  profiles: ProfileJson[],
  dims: string[],
): void {
  container.textContent = "";
  const width = 170;
  const height = 80;
  for (const profile of profiles) {
    const [a, b] = profile.pair;
    const figure = document.createElement("figure");
    figure.className = "edge-profile";
    figure.dataset.pair = `${a}-${b}`;

    const svg = svgEl("svg");
    svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    svg.setAttribute("class", "edge-chart");
    for (const key of PROPERTY_KEYS) {
      const series = profile.per_property[key];
      if (!series || !series.some((v) => (v ?? 0) > 0.02)) continue;
      const path = svgEl("path");
      path.setAttribute("d", areaPath(series, profile.window_bounds, width, height));
      path.setAttribute("fill", propertyColor(key));
      path.setAttribute("fill-opacity", "0.35");
      path.setAttribute("class", "edge-area");
      path.setAttribute("data-property", key);
      svg.appendChild(path);
    }

    const caption = document.createElement("figcaption");
    caption.textContent = `${dims[a] ?? a} → ${dims[b] ?? b}`;
    figure.append(svg, caption);
    container.appendChild(figure);
  }
}
