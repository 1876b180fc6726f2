/** Candidate axis-pair heatmap: double-click an open cell to fix the pair. */

import { heatColor } from "./color.js";
import type { ScoreMatrixJson } from "./types.js";

export interface HeatmapOptions {
  /** Invoked on double-click of an open cell (fix this pair). */
  onPick?: (i: number, j: number) => void;
  /** Invoked on single click of an open cell (inspect this pair). */
  onInspect?: (i: number, j: number) => void;
}

function label(text: string, extra: string): HTMLElement {
  const el = document.createElement("div");
  el.className = `hm-label ${extra}`;
  el.textContent = text;
  el.title = text;
  return el;
}

export function renderHeatmap(
  container: HTMLElement,
  matrix: ScoreMatrixJson,
  opts: HeatmapOptions = {},
): HTMLElement {
  container.textContent = "";
  const n = matrix.dims.length;
  const grid = document.createElement("div");
  grid.className = "heatmap";
  grid.style.gridTemplateColumns = `auto repeat(${n}, minmax(2rem, 1fr))`;

  grid.appendChild(label("", "hm-corner"));
  for (let j = 0; j < n; j++) grid.appendChild(label(matrix.dims[j], "hm-col"));

  for (let i = 0; i < n; i++) {
    grid.appendChild(label(matrix.dims[i], "hm-row"));
    for (let j = 0; j < n; j++) {
      const value = matrix.cells[i][j];
      const cell = document.createElement("div");
      cell.dataset.i = String(i);
      cell.dataset.j = String(j);
      if (value === null) {
        cell.className = "hm-cell hm-closed";
        cell.title = `${matrix.dims[i]} → ${matrix.dims[j]}: unavailable`;
      } else {
        cell.className = "hm-cell hm-open";
        cell.dataset.score = String(value);
        cell.style.background = heatColor(value);
        cell.style.color = value > 0.55 ? "#f8fafc" : "#1e293b";
        cell.textContent = value.toFixed(2);
        cell.title = `${matrix.dims[i]} → ${matrix.dims[j]}: ${value.toFixed(4)} (double-click to fix)`;
        const { onPick, onInspect } = opts;
        if (onPick) cell.addEventListener("dblclick", () => onPick(i, j));
        if (onInspect) cell.addEventListener("click", () => onInspect(i, j));
      }
      grid.appendChild(cell);
    }
  }
  container.appendChild(grid);
  return grid;
}
