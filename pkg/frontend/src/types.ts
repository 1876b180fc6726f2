/** Wire types for the axis-ordering HTTP API. */

export const PROPERTY_KEYS = [
  "pos_corr",
  "neg_corr",
  "pos_var",
  "neg_var",
  "pos_skew",
  "neg_skew",
  "outliers",
  "density_change",
  "clear_grouping",
  "split_up",
  "neighborhood",
  "fan",
] as const;

export type PropertyKey = (typeof PROPERTY_KEYS)[number];

export const PROPERTY_LABELS: Record<PropertyKey, string> = {
  pos_corr: "Positive correlation",
  neg_corr: "Negative correlation",
  pos_var: "Variance increase",
  neg_var: "Variance decrease",
  pos_skew: "Positive skew",
  neg_skew: "Negative skew",
  outliers: "Outliers",
  density_change: "Density change",
  clear_grouping: "Clear grouping",
  split_up: "Split up",
  neighborhood: "Parallel bundles",
  fan: "Fan spread",
};

export type WeightsMap = Record<PropertyKey, number>;

export interface WindowSpecJson {
  window_fraction: number;
  stride_fraction: number;
}

export interface UploadResponse {
  dataset_id: string;
  dims: string[];
  row_count: number;
  dropped_rows: number;
}

export interface RowsResponse {
  dims: string[];
  indices: number[];
  rows: number[][];
}

export type BreakdownCell = Record<PropertyKey, number>;

/** Full serialized score matrix (sessions and order documents carry this). */
export interface ScoreMatrixJson {
  dims: string[];
  cells: (number | null)[][];
  breakdown: (BreakdownCell | null)[][];
}

export interface MatrixDocument {
  dims: string[];
  window_spec: WindowSpecJson;
  weights: WeightsMap;
  seed: number;
  matrix: {
    cells: (number | null)[][];
    breakdown: (BreakdownCell | null)[][];
  };
  dropped_rows: number;
}

export interface ProfileJson {
  pair: [number, number];
  per_property: Record<PropertyKey, (number | null)[]>;
  window_bounds: [number, number][];
}

export interface ProfileDocument {
  dims: string[];
  window_spec: WindowSpecJson;
  seed: number;
  profile: ProfileJson & { member_rows: number[][] };
}

export interface EdgeScoreJson {
  i: number;
  j: number;
  score: number;
  breakdown: BreakdownCell;
}

export interface OrderingJson {
  order: number[];
  total_score: number;
  per_edge: EdgeScoreJson[];
  method: string;
}

export interface OrderDocument extends MatrixDocument {
  ordering: OrderingJson;
  profiles: ProfileJson[];
  donut: Record<PropertyKey, number>;
}

export interface StepLogEntry {
  pair: number[];
  weights: WeightsMap;
}

export interface SessionJson {
  id: string;
  dataset_id: string;
  prefix: number[];
  weights: WeightsMap;
  window_spec: WindowSpecJson;
  seed: number;
  step_log: StepLogEntry[];
}

export interface SessionPayload {
  session: SessionJson;
  matrix: ScoreMatrixJson;
}

export interface FinalizePayload {
  session: SessionJson;
  ordering: OrderingJson;
  profiles: ProfileJson[];
  donut: Record<PropertyKey, number>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

export function uniformWeights(value = 1.0): WeightsMap {
  const out = {} as WeightsMap;
  for (const key of PROPERTY_KEYS) out[key] = value;
  return out;
}

/** Serialize weights to the flat `key=value,...` query form the API accepts. */
export function weightsToParam(weights: WeightsMap): string {
  return PROPERTY_KEYS.map((key) => `${key}=${weights[key] ?? 0}`).join(",");
}
