/** Pure heatmap math: payload -> per-cell colors and legend bounds.
 *
 * Everything here is deterministic for a fixed payload (snapshot-testable)
 * and keeps the server's values attached to each cell so the rendered grid
 * can be compared against the payload cell for cell. */

import type { GridPayload, Layer } from "./types.js";

export interface ColorScale {
  min: number;
  max: number;
}

/** Fixed per-layer bounds (errors 0-6 m, strength -100..-40 dBm) prevent
 * the palette from rescaling mid-drag; auto mode tracks the payload. */
export const LAYER_SCALES: Record<Layer, ColorScale> = {
  strength: { min: -100, max: -40 },
  rss_error: { min: 0, max: 6 },
  fused_error: { min: 0, max: 6 },
};

export interface HeatCell {
  i: number;
  j: number;
  /** the server's value, unchanged (null = unbounded cell) */
  value: number | null;
  /** fill color; null for unbounded cells (rendered hatched) */
  color: string | null;
}

export class PayloadMismatchError extends Error {}

export function validatePayload(payload: GridPayload): void {
  if (payload.values.length !== payload.nx * payload.ny) {
    throw new PayloadMismatchError(
      `grid payload carries ${payload.values.length} values for a ` +
        `${payload.nx}x${payload.ny} raster`,
    );
  }
}

export function scaleBounds(payload: GridPayload, auto: boolean): ColorScale {
  if (auto && payload.min !== null && payload.max !== null) {
    return { min: payload.min, max: payload.max };
  }
  return LAYER_SCALES[payload.kind];
}

/** Blue -> cyan -> yellow -> red, linear in the scaled value. */
export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t));
  const stops: [number, [number, number, number]][] = [
    [0.0, [33, 57, 181]],
    [0.33, [64, 181, 173]],
    [0.66, [233, 205, 64]],
    [1.0, [201, 42, 42]],
  ];
  for (let s = 0; s < stops.length - 1; s++) {
    const [t0, c0] = stops[s]!;
    const [t1, c1] = stops[s + 1]!;
    if (x <= t1) {
      const u = (x - t0) / (t1 - t0);
      const rgb = c0.map((a, k) => Math.round(a + u * (c1[k]! - a)));
      return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
    }
  }
  return "rgb(201,42,42)";
}

export function heatmapCells(payload: GridPayload, scale: ColorScale): HeatCell[] {
  validatePayload(payload);
  const span = scale.max - scale.min;
  const cells: HeatCell[] = new Array(payload.values.length);
  for (let j = 0; j < payload.ny; j++) {
    for (let i = 0; i < payload.nx; i++) {
      const idx = j * payload.nx + i;
      const value = payload.values[idx] ?? null;
      // a constant grid (span 0, e.g. auto scale on a flat field) paints
      // uniformly at the palette midpoint
      const t = span > 0 ? ((value ?? 0) - scale.min) / span : 0.5;
      cells[idx] = {
        i,
        j,
        value,
        color: value === null ? null : colormap(t),
      };
    }
  }
  return cells;
}

export function legendTicks(scale: ColorScale, count = 5): number[] {
  const ticks: number[] = [];
  for (let k = 0; k < count; k++) {
    // endpoints pinned exactly so the legend always shows the reported bounds
    if (k === 0) ticks.push(scale.min);
    else if (k === count - 1) ticks.push(scale.max);
    else ticks.push(scale.min + ((scale.max - scale.min) * k) / (count - 1));
  }
  return ticks;
}

export function unboundedCount(payload: GridPayload): number {
  return payload.values.reduce((n: number, v) => n + (v === null ? 1 : 0), 0);
}
