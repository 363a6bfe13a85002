/** Shapes returned by the /v1 service API. The UI never computes
 * projections or metrics itself; every number on screen comes from
 * these payloads. */

export type Point = [number, number];

/** One staged move as the service expects it: [index, x, y]. */
export type Move = [number, number, number];

export interface SessionSummary {
  session_id: string;
  dataset: string;
  scenario: number;
  init: string;
  family: string;
  seed: number;
  steps: number;
  control_points: number[] | null;
  labels: number[] | null;
  layout: Point[];
  loss_trace: number[];
  iterations: number;
}

export interface LayoutResponse {
  step: number;
  layout: Point[];
  source: string;
}

export interface Metrics {
  nearest_centroid_precision?: number;
  silhouette_scaled?: number;
  neighbor_error_mean: number;
  neighbor_error_per_point: number[];
}

export interface OptimizeResult {
  layout: Point[];
  metrics: Metrics | null;
  loss_trace: number[];
}

export interface Job {
  job_id: string;
  status: 'running' | 'done' | 'failed';
  iteration: number;
  current_loss: number | null;
  result: OptimizeResult | null;
  error: { code: string; message: string } | null;
}

export interface Trajectory {
  index: number;
  old_xy: Point;
  new_xy: Point;
}

export interface CreateSessionRequest {
  dataset: string;
  scenario?: number;
  init?: string;
  family?: string;
  seed?: number;
  iterations?: number;
  learning_rate?: number;
  control_points?: number;
  unlabeled?: boolean;
}
