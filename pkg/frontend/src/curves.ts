/** Three-curve panel helpers: request validation, series extraction, and
 * the dominance check asserted against live payloads in tests. */

import type { CurveRow, CurvesPayload, FloorplanDto } from "./types.js";

export interface CurveSeries {
  steps: number[];
  rss: (number | null)[];
  pdr: (number | null)[];
  fused: (number | null)[];
}

export function toSeries(payload: CurvesPayload): CurveSeries {
  const rows = payload.rows;
  return {
    steps: rows.map((r) => r.step),
    rss: rows.map((r) => r.rss_rmse_m),
    pdr: rows.map((r) => r.pdr_rmse_m),
    fused: rows.map((r) => r.fused_rmse_m),
  };
}

/** fused <= min(rss, pdr) wherever all three are finite. */
export function fusedDominates(rows: CurveRow[]): boolean {
  return rows.every((r) => {
    if (r.fused_rmse_m === null || r.pdr_rmse_m === null) return true;
    if (r.rss_rmse_m !== null && r.fused_rmse_m > r.rss_rmse_m) return false;
    return r.fused_rmse_m <= r.pdr_rmse_m;
  });
}

/** Client-side pre-validation of a trajectory form; returns a message for
 * the inline error slot, or null when the walk stays inside the plan. */
export function trajectoryError(
  plan: FloorplanDto,
  startX: number,
  startY: number,
  heading: number,
  steps: number,
  stepLengthM: number,
): string | null {
  if (!Number.isFinite(startX) || !Number.isFinite(startY)) return "start must be numeric";
  if (!Number.isFinite(heading) || heading < -Math.PI || heading > Math.PI) {
    return "heading must lie in [-pi, pi]";
  }
  if (!Number.isInteger(steps) || steps < 1) return "steps must be a positive integer";
  const endX = startX + steps * stepLengthM * Math.cos(heading);
  const endY = startY + steps * stepLengthM * Math.sin(heading);
  const inside = (x: number, y: number) =>
    x >= 0 && x <= plan.width_m && y >= 0 && y <= plan.height_m;
  if (!inside(startX, startY)) return "start is outside the floorplan";
  if (!inside(endX, endY)) return "trajectory leaves the floorplan";
  return null;
}
