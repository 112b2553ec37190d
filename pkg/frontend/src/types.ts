/** Wire types for the beaconplan HTTP API. The UI never computes model
 * math itself; every displayed number originates from one of these
 * payloads. */

export type Layer = "strength" | "rss_error" | "fused_error";

export interface BeaconDto {
  id: string;
  x_m: number;
  y_m: number;
}

export interface FloorplanDto {
  width_m: number;
  height_m: number;
}

export interface ProjectDoc {
  id: string;
  name: string;
  version: number;
  floorplan: FloorplanDto;
  beacons: BeaconDto[];
  grid: { resolution_m: number };
  [key: string]: unknown;
}

export interface GridPayload {
  kind: Layer;
  unit: string;
  nx: number;
  ny: number;
  resolution_m: number;
  project_version: number;
  /** min/max over bounded cells, as reported by the server */
  min: number | null;
  max: number | null;
  /** row-major (row j=0 first); null marks an unbounded cell */
  values: (number | null)[];
}

export interface CurveRow {
  step: number;
  rss_rmse_m: number | null;
  pdr_rmse_m: number | null;
  fused_rmse_m: number | null;
}

export interface CurvesPayload {
  project_version: number;
  rows: CurveRow[];
}

export type JobState = "QUEUED" | "RUNNING" | "DONE" | "FAILED";

export interface JobResult {
  best_objective: number;
  evals_used: number;
  best_layout: { beacons: BeaconDto[] };
  /** rows of [eval_index, current, best, temperature] */
  history: [number, number, number, number][];
}

export interface JobPayload {
  id: string;
  project_id: string;
  kind: string;
  state: JobState;
  progress: { evals_used: number; max_evals: number };
  best_objective: number | null;
  error: string | null;
  result: JobResult | null;
}

export interface MapsRequest {
  kind: Layer;
  resolution_m?: number;
  pdr_mode?: "uniform_horizon" | "distance_to_beacon";
  horizon_steps?: number;
}

export interface CurvesRequest {
  start: [number, number];
  heading: number;
  steps: number;
}

export interface OptimizeOverrides {
  beacon_count?: number;
  objective?: "mean_rss_error" | "mean_fused_error";
  max_evals?: number;
  seed?: number;
  [key: string]: unknown;
}
