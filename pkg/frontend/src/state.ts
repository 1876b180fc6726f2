/** Observable application state driving every panel. */

import { ApiError } from "./api.js";
import type { ComputeParams, JobOptions } from "./api.js";
import type {
  FinalizePayload,
  MatrixDocument,
  OrderDocument,
  OrderingJson,
  ProfileDocument,
  ProfileJson,
  PropertyKey,
  RowsResponse,
  ScoreMatrixJson,
  SessionJson,
  SessionPayload,
  UploadResponse,
  WeightsMap,
} from "./types.js";
import { uniformWeights } from "./types.js";

/** The slice of the HTTP client the state machine needs (tests fake this). */
export interface ApiSurface {
  uploadDataset(
    csv: string,
    opts?: { name?: string; columns?: string[] },
  ): Promise<UploadResponse>;
  rows(datasetId: string, indices?: number[]): Promise<RowsResponse>;
  matrix(
    datasetId: string,
    params: ComputeParams,
    job?: JobOptions,
  ): Promise<MatrixDocument>;
  profile(
    datasetId: string,
    i: number,
    j: number,
    params: Omit<ComputeParams, "weights">,
  ): Promise<ProfileDocument>;
  order(
    datasetId: string,
    params: ComputeParams,
    mode?: "tsp" | "greedy",
    job?: JobOptions,
  ): Promise<OrderDocument>;
  startSession(opts: {
    datasetId: string;
    seed: number;
    weights: WeightsMap;
    window?: number;
    stride?: number | null;
    permutations?: number;
  }): Promise<SessionPayload>;
  choose(sessionId: string, i: number, j: number): Promise<SessionPayload>;
  setWeights(sessionId: string, weights: WeightsMap): Promise<SessionPayload>;
  undo(sessionId: string): Promise<SessionPayload>;
  finalize(sessionId: string): Promise<FinalizePayload>;
}

export interface ComputeSettings {
  weights: WeightsMap;
  window: number;
  stride: number | null;
  seed: number;
  permutations: number;
}

const MAX_DISPLAY_ROWS = 400;

export class AppState {
  dataset: UploadResponse | null = null;
  displayRows: number[][] = [];
  settings: ComputeSettings = {
    weights: uniformWeights(),
    window: 0.25,
    stride: null,
    seed: 7,
    permutations: 200,
  };
  session: SessionJson | null = null;
  candidate: ScoreMatrixJson | null = null;
  ordering: OrderingJson | null = null;
  profiles: ProfileJson[] = [];
  donut: Record<PropertyKey, number> | null = null;
  selectedPair: [number, number] | null = null;
  pairProfile: ProfileDocument | null = null;
  localWindow = 0;
  busy = false;
  error: string | null = null;

  private listeners = new Set<() => void>();
  private generation = 0;

  constructor(readonly api: ApiSurface) {}

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /**
   * Run one fetch task; its returned applier commits the new state.
   * Latest-wins: a task superseded by a newer one has its result dropped,
   * so stale responses can never overwrite fresher renders.
   */
  private async run(task: () => Promise<(() => void) | void>): Promise<void> {
    const gen = ++this.generation;
    this.busy = true;
    this.error = null;
    this.emit();
    try {
      const apply = await task();
      if (gen === this.generation && apply) apply();
    } catch (err) {
      if (gen === this.generation) {
        this.error =
          err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      }
    } finally {
      if (gen === this.generation) this.busy = false;
      this.emit();
    }
  }

  get computeParams(): ComputeParams {
    return {
      weights: this.settings.weights,
      window: this.settings.window,
      seed: this.settings.seed,
      stride: this.settings.stride,
      permutations: this.settings.permutations,
    };
  }

  async upload(csv: string, name?: string): Promise<void> {
    await this.run(async () => {
      const dataset = await this.api.uploadDataset(csv, { name });
      const count = Math.min(dataset.row_count, MAX_DISPLAY_ROWS);
      const indices = Array.from({ length: count }, (_, k) => k);
      const rows = (await this.api.rows(dataset.dataset_id, indices)).rows;
      return () => {
        this.dataset = dataset;
        this.displayRows = rows;
        this.session = null;
        this.candidate = null;
        this.ordering = null;
        this.profiles = [];
        this.donut = null;
        this.selectedPair = null;
        this.pairProfile = null;
      };
    });
  }

  async autoOrder(mode: "tsp" | "greedy" = "tsp"): Promise<void> {
    const dataset = this.dataset;
    if (!dataset) return;
    await this.run(async () => {
      const doc = await this.api.order(dataset.dataset_id, this.computeParams, mode);
      return () => {
        this.session = null;
        this.candidate = { dims: doc.dims, ...doc.matrix };
        this.ordering = doc.ordering;
        this.profiles = doc.profiles;
        this.donut = doc.donut;
      };
    });
  }

  async startSession(): Promise<void> {
    const dataset = this.dataset;
    if (!dataset) return;
    await this.run(async () => {
      const payload = await this.api.startSession({
        datasetId: dataset.dataset_id,
        seed: this.settings.seed,
        weights: this.settings.weights,
        window: this.settings.window,
        stride: this.settings.stride,
        permutations: this.settings.permutations,
      });
      return () => {
        this.applySession(payload);
        this.ordering = null;
        this.profiles = [];
        this.donut = null;
      };
    });
  }

  private applySession(payload: SessionPayload): void {
    this.session = payload.session;
    this.candidate = payload.matrix;
  }

  async choose(i: number, j: number): Promise<void> {
    const session = this.session;
    if (!session) {
      await this.selectPair(i, j);
      return;
    }
    await this.run(async () => {
      const payload = await this.api.choose(session.id, i, j);
      return () => this.applySession(payload);
    });
  }

  async undo(): Promise<void> {
    const session = this.session;
    if (!session) return;
    await this.run(async () => {
      const payload = await this.api.undo(session.id);
      return () => this.applySession(payload);
    });
  }

  async setWeight(key: PropertyKey, value: number): Promise<void> {
    this.settings.weights = { ...this.settings.weights, [key]: value };
    const session = this.session;
    if (!session) {
      this.emit();
      return;
    }
    await this.run(async () => {
      const payload = await this.api.setWeights(session.id, this.settings.weights);
      return () => this.applySession(payload);
    });
  }

  /** Change window granularity; redraws the selected pair at the new size. */
  async setWindow(windowFraction: number): Promise<void> {
    this.settings.window = windowFraction;
    const pair = this.selectedPair;
    if (!pair) {
      this.emit();
      return;
    }
    await this.selectPair(pair[0], pair[1]);
  }

  async finalize(): Promise<void> {
    const session = this.session;
    if (!session) return;
    await this.run(async () => {
      const payload = await this.api.finalize(session.id);
      return () => {
        this.session = payload.session;
        this.ordering = payload.ordering;
        this.profiles = payload.profiles;
        this.donut = payload.donut;
      };
    });
  }

  async selectPair(i: number, j: number): Promise<void> {
    const dataset = this.dataset;
    if (!dataset) return;
    await this.run(async () => {
      const doc = await this.api.profile(dataset.dataset_id, i, j, {
        window: this.settings.window,
        seed: this.settings.seed,
        stride: this.settings.stride,
        permutations: this.settings.permutations,
      });
      return () => {
        this.pairProfile = doc;
        this.selectedPair = [i, j];
        this.localWindow = 0;
      };
    });
  }

  selectWindow(k: number): void {
    this.localWindow = k;
    this.emit();
  }

  /** Member rows of the selected window, for highlighting polylines. */
  highlightedRows(): Set<number> {
    const members = this.pairProfile?.profile.member_rows[this.localWindow];
    return new Set(members ?? []);
  }

  /** Axis order to draw: final ordering, else session prefix + rest, else natural. */
  orderedAxes(): number[] {
    const dimCount = this.dataset?.dims.length ?? 0;
    if (this.ordering) return this.ordering.order;
    const all = Array.from({ length: dimCount }, (_, k) => k);
    const prefix = this.session?.prefix ?? [];
    if (prefix.length === 0) return all;
    const used = new Set(prefix);
    return [...prefix, ...all.filter((axis) => !used.has(axis))];
  }
}
