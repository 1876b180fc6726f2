/** Donut chart of each property's share of the ordering's total score. */

import { propertyColor } from "./color.js";
import {
  PROPERTY_KEYS,
  PROPERTY_LABELS,
  type PropertyKey,
} from "./types.js";
import { SVG_NS } from "./pcp.js";

const SIZE = 180;
const RADIUS = 62;
const STROKE = 26;

export function renderDonut(
  container: HTMLElement,
  shares: Record<PropertyKey, number>,
): SVGSVGElement {
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("class", "donut");
  const circumference = 2 * Math.PI * RADIUS;

  // Start each segment where the previous one ended, 12 o'clock first.
  let offset = circumference / 4;
  for (const key of PROPERTY_KEYS) {
    const share = shares[key] ?? 0;
    if (share <= 0) continue;
    const seg = document.createElementNS(SVG_NS, "circle");
    seg.setAttribute("cx", String(SIZE / 2));
    seg.setAttribute("cy", String(SIZE / 2));
    seg.setAttribute("r", String(RADIUS));
    seg.setAttribute("fill", "none");
    seg.setAttribute("stroke", propertyColor(key));
    seg.setAttribute("stroke-width", String(STROKE));
    const arc = share * circumference;
    seg.setAttribute("stroke-dasharray", `${arc} ${circumference - arc}`);
    seg.setAttribute("stroke-dashoffset", String(offset));
    seg.setAttribute("class", "donut-seg");
    seg.setAttribute("data-property", key);
    seg.setAttribute("data-share", String(share));
    svg.appendChild(seg);
    offset -= arc;
  }

  const legend = document.createElement("ul");
  legend.className = "donut-legend";
  for (const key of PROPERTY_KEYS) {
    const share = shares[key] ?? 0;
    if (share <= 0) continue;
    const item = document.createElement("li");
    item.dataset.property = key;
    item.dataset.share = String(share);
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.background = propertyColor(key);
    const text = document.createElement("span");
    text.textContent = `${PROPERTY_LABELS[key]} ${(share * 100).toFixed(1)}%`;
    item.append(swatch, text);
    legend.appendChild(item);
  }

  container.append(svg, legend);
  return svg;
}
