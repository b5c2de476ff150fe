/**
 * Wire types for the /api/v1 prediction service.
 *
 * Every number rendered by the UI comes verbatim from one of these fields;
 * the client computes layout, never statistics.
 */

export interface FeaturePayload {
  age: number;
  tumor_size_cm: number;
  p53_pct: number;
  sbr_grade: number;
  mitotic_grade: number;
  er_pct: number;
  pr_pct: number;
  ki67_pct: number;
  /** -1 encodes unknown/NA */
  lymph_nodes: number;
}

export type FeatureName = keyof FeaturePayload;

export interface HistogramBin {
  lo: number;
  hi: number;
  mass: number;
}

export interface ClassProbs {
  low: number;
  intermediate: number;
  high: number;
}

export interface BinaryProbs {
  le25: number;
  gt25: number;
}

export interface Summary {
  mean: number;
  median: number;
  std_error: number;
  credible_interval_90: [number, number];
  class_probs: ClassProbs;
  binary_probs: BinaryProbs;
}

export interface NeighborEntry {
  rank: number;
  id: string;
  weight: number;
  features: Record<string, number>;
  odx_score: number;
}

export interface PredictionResponse {
  schema: string;
  model_version: string;
  model: { num_trees: number; training_rows: number; fingerprint: string };
  summary: Summary;
  histogram: HistogramBin[];
  neighbors: NeighborEntry[];
  warnings: string[];
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ModelInfo {
  model_version: string;
  num_trees: number;
  training_rows: number;
  seed: number;
  fingerprint: string;
  features: Array<Record<string, unknown>>;
}

/** The binary risk boundary; bins with hi <= this belong to the <=25 band. */
export const BINARY_CUT = 25;
/** Low/intermediate boundary for the three-band view. */
export const LOW_CUT = 16;
