/** Control panel: data loading, compute settings, weight sliders, actions. */

import type { AppState } from "./state.js";
import {
  PROPERTY_KEYS,
  PROPERTY_LABELS,
  type PropertyKey,
} from "./types.js";

/** Deterministic PRNG so the demo button always yields the same dataset. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Six-column demo CSV with correlated, anti-correlated, and grouped columns. */
export function demoCsv(rows = 400, seed = 20260817): string {
  const rnd = mulberry32(seed);
  const lines = ["alpha,beta,gamma,delta,epsilon,zeta"];
  for (let r = 0; r < rows; r++) {
    const u = rnd();
    const cluster = rnd() < 0.5 ? 0.15 : 0.8;
    const values = [
      u,
      0.82 * u + 0.18 * rnd(),
      1 - 0.9 * u + 0.1 * rnd() * 0.1,
      rnd(),
      cluster + 0.12 * rnd(),
      0.5 * u + 0.5 * rnd(),
    ];
    lines.push(values.map((v) => v.toFixed(6)).join(","));
  }
  return lines.join("\n") + "\n";
}

function section(title: string): HTMLElement {
  const wrap = document.createElement("section");
  wrap.className = "side-section";
  const heading = document.createElement("h3");
  heading.textContent = title;
  wrap.appendChild(heading);
  return wrap;
}

function numberField(
  label: string,
  value: number,
  attrs: Partial<Record<"min" | "max" | "step", string>>,
  onChange: (v: number) => void,
): HTMLElement {
  const row = document.createElement("label");
  row.className = "field-row";
  const caption = document.createElement("span");
  caption.textContent = label;
  const input = document.createElement("input");
  input.type = "number";
  input.value = String(value);
  for (const [key, v] of Object.entries(attrs)) input.setAttribute(key, v);
  input.addEventListener("change", () => {
    const parsed = Number(input.value);
    if (Number.isFinite(parsed)) onChange(parsed);
  });
  row.append(caption, input);
  return row;
}

export function renderSidebar(container: HTMLElement, state: AppState): void {
  container.textContent = "";

  // --- data -----------------------------------------------------------
  const data = section("Data");
  const file = document.createElement("input");
  file.type = "file";
  file.accept = ".csv,text/csv";
  file.addEventListener("change", () => {
    const picked = file.files?.[0];
    if (!picked) return;
    void picked.text().then((text) => state.upload(text, picked.name));
  });
  const demoBtn = document.createElement("button");
  demoBtn.type = "button";
  demoBtn.textContent = "Generate demo data";
  demoBtn.addEventListener("click", () => void state.upload(demoCsv(), "demo.csv"));
  const datasetInfo = document.createElement("div");
  datasetInfo.className = "dataset-info";
  data.append(file, demoBtn, datasetInfo);

  // --- compute settings -------------------------------------------------
  const settings = section("Settings");
  settings.append(
    numberField("Seed", state.settings.seed, { min: "0", step: "1" }, (v) => {
      state.settings.seed = Math.max(0, Math.round(v));
    }),
    numberField(
      "Window fraction",
      state.settings.window,
      { min: "0.05", max: "1", step: "0.05" },
      (v) => void state.setWindow(v),
    ),
    numberField(
      "Permutations",
      state.settings.permutations,
      { min: "100", step: "50" },
      (v) => {
        state.settings.permutations = Math.max(100, Math.round(v));
      },
    ),
  );

  // --- weights ----------------------------------------------------------
  const weights = section("Property weights");
  const readouts = new Map<PropertyKey, HTMLElement>();
  for (const key of PROPERTY_KEYS) {
    const row = document.createElement("div");
    row.className = "weight-row";
    row.dataset.property = key;
    const name = document.createElement("span");
    name.className = "weight-name";
    name.textContent = PROPERTY_LABELS[key];
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.05";
    slider.value = String(state.settings.weights[key]);
    const readout = document.createElement("span");
    readout.className = "weight-value";
    readout.textContent = Number(slider.value).toFixed(2);
    readouts.set(key, readout);
    slider.addEventListener("input", () => {
      readout.textContent = Number(slider.value).toFixed(2);
    });
    slider.addEventListener("change", () => {
      void state.setWeight(key, Number(slider.value));
    });
    row.append(name, slider, readout);
    weights.appendChild(row);
  }

  // --- actions ----------------------------------------------------------
  const actions = section("Actions");
  const mkButton = (text: string, onClick: () => void): HTMLButtonElement => {
    const btn = document.createElement("button");
    btn.type = "button";
    btn.textContent = text;
    btn.addEventListener("click", onClick);
    actions.appendChild(btn);
    return btn;
  };
  mkButton("Order automatically", () => void state.autoOrder("tsp"));
  mkButton("Order greedily", () => void state.autoOrder("greedy"));
  mkButton("Start manual session", () => void state.startSession());
  const undoBtn = mkButton("Undo choice", () => void state.undo());
  const finalizeBtn = mkButton("Finalize order", () => void state.finalize());

  const status = document.createElement("div");
  status.className = "status-line";
  status.setAttribute("role", "status");

  container.append(data, settings, weights, actions, status);

  state.subscribe(() => {
    const d = state.dataset;
    datasetInfo.textContent = d
      ? `${d.dims.length} axes · ${d.row_count} rows (${d.dropped_rows} dropped)`
      : "no dataset loaded";
    const inSession = state.session !== null;
    undoBtn.disabled = !inSession || state.session!.prefix.length === 0;
    finalizeBtn.disabled = !inSession;
    status.classList.toggle("status-error", state.error !== null);
    status.textContent = state.error
      ? `error — ${state.error}`
      : state.busy
        ? "working…"
        : state.session
          ? `session: ${state.session.prefix.length} axes fixed`
          : state.ordering
            ? `ordered (${state.ordering.method}), score ${state.ordering.total_score.toFixed(3)}`
            : "ready";
  });
}
