/** Typed HTTP client for the axis-ordering service. */

import type {
  FinalizePayload,
  MatrixDocument,
  OrderDocument,
  ProfileDocument,
  RowsResponse,
  SessionPayload,
  UploadResponse,
  WeightsMap,
} from "./types.js";
import { weightsToParam } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }

  /** Map a non-2xx response body to an error, tolerating foreign shapes. */
  static fromBody(status: number, body: unknown): ApiError {
    if (
      body !== null &&
      typeof body === "object" &&
      typeof (body as { code?: unknown }).code === "string"
    ) {
      const b = body as { code: string; message?: unknown; detail?: unknown };
      return new ApiError(
        b.code,
        typeof b.message === "string" ? b.message : JSON.stringify(body),
        status,
        b.detail ?? null,
      );
    }
    return new ApiError(`http_${status}`, JSON.stringify(body), status, body);
  }
}

export interface ComputeParams {
  weights: WeightsMap;
  window: number;
  seed: number;
  stride?: number | null;
  permutations?: number;
}

export interface JobOptions {
  intervalMs?: number;
  timeoutMs?: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

type Query = Record<string, string | number | undefined>;

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly base: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(
    method: string,
    path: string,
    query?: Query,
    init?: RequestInit,
  ): Promise<{ status: number; body: unknown }> {
    let url = this.base + path;
    if (query) {
      const qs = new URLSearchParams();
      for (const [key, value] of Object.entries(query)) {
        if (value !== undefined) qs.set(key, String(value));
      }
      const encoded = qs.toString();
      if (encoded) url += `?${encoded}`;
    }
    const res = await this.fetchFn(url, { method, ...init });
    const text = await res.text();
    let body: unknown = null;
    if (text) {
      try {
        body = JSON.parse(text);
      } catch {
        body = text;
      }
    }
    if (!res.ok) throw ApiError.fromBody(res.status, body);
    return { status: res.status, body };
  }

  private postJson(path: string, payload: unknown, query?: Query) {
    return this.request("POST", path, query, {
      body: JSON.stringify(payload),
      headers: { "content-type": "application/json" },
    });
  }

  private computeQuery(params: ComputeParams): Query {
    return {
      weights: weightsToParam(params.weights),
      window: params.window,
      seed: params.seed,
      stride: params.stride ?? undefined,
      permutations: params.permutations,
    };
  }

  async health(): Promise<{ status: string }> {
    return (await this.request("GET", "/health")).body as { status: string };
  }

  async uploadDataset(
    csv: string,
    opts: { name?: string; columns?: string[] } = {},
  ): Promise<UploadResponse> {
    const { body } = await this.request(
      "POST",
      "/datasets",
      { name: opts.name, columns: opts.columns?.join(",") },
      { body: csv, headers: { "content-type": "text/csv" } },
    );
    return body as UploadResponse;
  }

  async rows(datasetId: string, indices?: number[]): Promise<RowsResponse> {
    const { body } = await this.request("GET", `/datasets/${datasetId}/rows`, {
      indices: indices?.join(","),
    });
    return body as RowsResponse;
  }

  /** Fetch the score matrix, transparently finishing offloaded jobs. */
  async matrix(
    datasetId: string,
    params: ComputeParams,
    job?: JobOptions,
  ): Promise<MatrixDocument> {
    const { status, body } = await this.request(
      "GET",
      `/datasets/${datasetId}/matrix`,
      this.computeQuery(params),
    );
    if (status === 202) {
      return this.pollJob<MatrixDocument>((body as { job_id: string }).job_id, job);
    }
    return body as MatrixDocument;
  }

  async profile(
    datasetId: string,
    i: number,
    j: number,
    params: Omit<ComputeParams, "weights">,
  ): Promise<ProfileDocument> {
    const { body } = await this.request("GET", `/datasets/${datasetId}/profile`, {
      i,
      j,
      window: params.window,
      seed: params.seed,
      stride: params.stride ?? undefined,
      permutations: params.permutations,
    });
    return body as ProfileDocument;
  }

  /** Compute matrix + ordering, transparently finishing offloaded jobs. */
  async order(
    datasetId: string,
    params: ComputeParams,
    mode: "tsp" | "greedy" = "tsp",
    job?: JobOptions,
  ): Promise<OrderDocument> {
    const { status, body } = await this.request(
      "POST",
      `/datasets/${datasetId}/order`,
      { ...this.computeQuery(params), mode },
    );
    if (status === 202) {
      return this.pollJob<OrderDocument>((body as { job_id: string }).job_id, job);
    }
    return body as OrderDocument;
  }

  async pollJob<T>(jobId: string, opts: JobOptions = {}): Promise<T> {
    const interval = opts.intervalMs ?? 150;
    const deadline = Date.now() + (opts.timeoutMs ?? 120_000);
    for (;;) {
      const { body } = await this.request("GET", `/jobs/${jobId}`);
      const job = body as {
        status: string;
        result?: T;
        error?: { code: string; message: string; detail: unknown };
      };
      if (job.status === "done") return job.result as T;
      if (job.status === "error") {
        const err = job.error ?? { code: "job_failed", message: "job failed", detail: null };
        throw new ApiError(err.code, err.message, 0, err.detail);
      }
      if (Date.now() > deadline) {
        throw new ApiError("job_timeout", `job ${jobId} still running`, 0, null);
      }
      await sleep(interval);
    }
  }

  async startSession(opts: {
    datasetId: string;
    seed: number;
    weights: WeightsMap;
    window?: number;
    stride?: number | null;
    permutations?: number;
  }): Promise<SessionPayload> {
    const { body } = await this.postJson("/sessions", {
      dataset_id: opts.datasetId,
      seed: opts.seed,
      weights: opts.weights,
      window: opts.window,
      stride: opts.stride ?? undefined,
      permutations: opts.permutations,
    });
    return body as SessionPayload;
  }

  async choose(sessionId: string, i: number, j: number): Promise<SessionPayload> {
    const { body } = await this.postJson(`/sessions/${sessionId}/choose`, { i, j });
    return body as SessionPayload;
  }

  async setWeights(sessionId: string, weights: WeightsMap): Promise<SessionPayload> {
    const { body } = await this.postJson(`/sessions/${sessionId}/weights`, { weights });
    return body as SessionPayload;
  }

  async undo(sessionId: string): Promise<SessionPayload> {
    const { body } = await this.postJson(`/sessions/${sessionId}/undo`, {});
    return body as SessionPayload;
  }

  async finalize(sessionId: string): Promise<FinalizePayload> {
    const { body } = await this.postJson(`/sessions/${sessionId}/finalize`, {});
    return body as FinalizePayload;
  }
}
