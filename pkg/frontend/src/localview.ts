/** Per-window drill-down for one axis pair: scatterplot + window strip + property bars. */

import { propertyColor } from "./color.js";
import { SVG_NS } from "./pcp.js";
import {
  PROPERTY_KEYS,
  PROPERTY_LABELS,
  type ProfileDocument,
} from "./types.js";

const SCATTER_W = 240;
const SCATTER_H = 200;
const SCATTER_PAD = 14;

/** Scatterplot of the pair's values with the window's member rows highlighted. */
function renderScatter(
  doc: ProfileDocument,
  rows: number[][],
  members: Set<number>,
): SVGSVGElement {
  const [i, j] = doc.profile.pair;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SCATTER_W} ${SCATTER_H}`);
  svg.setAttribute("class", "local-scatter");

  const frame = document.createElementNS(SVG_NS, "rect");
  frame.setAttribute("x", String(SCATTER_PAD));
  frame.setAttribute("y", String(SCATTER_PAD));
  frame.setAttribute("width", String(SCATTER_W - 2 * SCATTER_PAD));
  frame.setAttribute("height", String(SCATTER_H - 2 * SCATTER_PAD));
  frame.setAttribute("class", "scatter-frame");
  svg.appendChild(frame);

  rows.forEach((row, r) => {
    const x = row[i];
    const y = row[j];
    if (x === undefined || y === undefined) return;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(SCATTER_PAD + x * (SCATTER_W - 2 * SCATTER_PAD)));
    dot.setAttribute("cy", String(SCATTER_PAD + (1 - y) * (SCATTER_H - 2 * SCATTER_PAD)));
    dot.setAttribute("r", members.has(r) ? "3.5" : "2");
    dot.setAttribute(
      "class",
      members.has(r) ? "sc-dot sc-highlight" : "sc-dot",
    );
    dot.dataset.row = String(r);
    svg.appendChild(dot);
  });

  const xLabel = document.createElementNS(SVG_NS, "text");
  xLabel.setAttribute("x", String(SCATTER_W / 2));
  xLabel.setAttribute("y", String(SCATTER_H - 2));
  xLabel.setAttribute("text-anchor", "middle");
  xLabel.setAttribute("class", "scatter-label");
  xLabel.textContent = doc.dims[i] ?? `#${i}`;
  svg.appendChild(xLabel);

  const yLabel = document.createElementNS(SVG_NS, "text");
  yLabel.setAttribute("x", "10");
  yLabel.setAttribute("y", String(SCATTER_H / 2));
  yLabel.setAttribute("text-anchor", "middle");
  yLabel.setAttribute(
    "transform",
    `rotate(-90 10 ${SCATTER_H / 2})`,
  );
  yLabel.setAttribute("class", "scatter-label");
  yLabel.textContent = doc.dims[j] ?? `#${j}`;
  svg.appendChild(yLabel);

  return svg;
}

export function renderLocalView(
  container: HTMLElement,
  doc: ProfileDocument,
  windowIndex: number,
  rows: number[][],
  onSelect?: (k: number) => void,
): void {
  container.textContent = "";
  const { profile } = doc;
  const [i, j] = profile.pair;
  const windowCount = profile.window_bounds.length;
  const k = Math.min(Math.max(windowIndex, 0), Math.max(windowCount - 1, 0));
  const members = profile.member_rows[k] ?? [];

  const info = document.createElement("div");
  info.className = "window-info";
  info.dataset.pair = `${i}-${j}`;
  info.dataset.window = String(k);
  info.dataset.memberCount = String(members.length);
  info.textContent =
    `${doc.dims[i] ?? i} → ${doc.dims[j] ?? j} · ` +
    `window ${k + 1}/${windowCount} · ${members.length} rows`;

  const strip = document.createElement("div");
  strip.className = "window-strip";
  profile.window_bounds.forEach(([lo, hi], idx) => {
    const btn = document.createElement("button");
    btn.type = "button";
    btn.className = idx === k ? "win-btn win-active" : "win-btn";
    btn.dataset.window = String(idx);
    btn.dataset.memberCount = String(profile.member_rows[idx]?.length ?? 0);
    btn.textContent = `${lo.toFixed(2)}–${hi.toFixed(2)}`;
    if (onSelect) btn.addEventListener("click", () => onSelect(idx));
    strip.appendChild(btn);
  });

  const bars = document.createElement("div");
  bars.className = "prop-bars";
  for (const key of PROPERTY_KEYS) {
    const value = profile.per_property[key]?.[k] ?? null;
    const row = document.createElement("div");
    row.className = "prop-bar-row";
    row.dataset.property = key;
    row.dataset.score = value === null ? "" : String(value);

    const name = document.createElement("span");
    name.className = "prop-bar-name";
    name.textContent = PROPERTY_LABELS[key];

    const track = document.createElement("div");
    track.className = "prop-bar-track";
    const fill = document.createElement("div");
    fill.className = "prop-bar-fill";
    fill.style.width = `${(value ?? 0) * 100}%`;
    fill.style.background = propertyColor(key);
    track.appendChild(fill);

    const readout = document.createElement("span");
    readout.className = "prop-bar-value";
    readout.textContent = value === null ? "–" : value.toFixed(3);

    row.append(name, track, readout);
    bars.appendChild(row);
  }

  const scatter = renderScatter(doc, rows, new Set(members));
  container.append(info, scatter, strip, bars);
}
