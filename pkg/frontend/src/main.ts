/** Entry point: wires the panels to the shared state. */

import { ApiClient } from "./api.js";
import { AppState } from "./state.js";
import { renderDonut } from "./donut.js";
import { renderHeatmap } from "./heatmap.js";
import { renderLocalView } from "./localview.js";
import { renderEdgeProfiles, renderPcp } from "./pcp.js";
import { renderSidebar } from "./sidebar.js";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

export function mount(): void {
  const state = new AppState(new ApiClient(""));
  const heatmapEl = byId("heatmap");
  const pcpEl = byId("pcp");
  const edgesEl = byId("edges");
  const localEl = byId("local");
  const donutEl = byId("donut");

  renderSidebar(byId("sidebar"), state);

  state.subscribe(() => {
    if (state.candidate) {
      heatmapEl.textContent = "";
      if (state.session) {
        const prefixLine = document.createElement("div");
        prefixLine.className = "prefix-line";
        prefixLine.dataset.prefix = state.session.prefix.join(",");
        prefixLine.textContent =
          state.session.prefix.length > 0
            ? "chain: " +
              state.session.prefix
                .map((axis) => state.dataset?.dims[axis] ?? `#${axis}`)
                .join(" → ")
            : "chain: (pick a cell to start)";
        heatmapEl.appendChild(prefixLine);
      }
      const grid = document.createElement("div");
      heatmapEl.appendChild(grid);
      renderHeatmap(grid, state.candidate, {
        onPick: (i, j) => void state.choose(i, j),
        onInspect: (i, j) => void state.selectPair(i, j),
      });
    } else {
      heatmapEl.textContent = "upload data, then order or start a session";
    }

    if (state.dataset && state.displayRows.length > 0) {
      renderPcp(pcpEl, state.dataset.dims, state.displayRows, state.orderedAxes(), {
        highlightRows: state.highlightedRows(),
        profiles: state.profiles,
      });
    } else {
      pcpEl.textContent = "";
    }

    renderEdgeProfiles(edgesEl, state.profiles, state.dataset?.dims ?? []);

    if (state.pairProfile) {
      renderLocalView(
        localEl,
        state.pairProfile,
        state.localWindow,
        state.displayRows,
        (k) => state.selectWindow(k),
      );
    } else {
      localEl.textContent = "";
    }

    if (state.donut) {
      renderDonut(donutEl, state.donut);
    } else {
      donutEl.textContent = "";
    }
  });
}

document.addEventListener("DOMContentLoaded", mount);
