/** Canvas painting: floorplan to scale, heatmap cells, hatched unbounded
 * cells, beacon markers, and the numeric legend. Pure-math inputs come
 * from heatmap.ts; this module only draws. */

import { heatmapCells, legendTicks } from "./heatmap.js";
import type { ColorScale } from "./heatmap.js";
import type { BeaconDto, FloorplanDto, GridPayload } from "./types.js";

export const BEACON_RADIUS_PX = 7;

export interface Viewport {
  /** pixels per meter */
  scale: number;
  width: number;
  height: number;
}

export function fitViewport(plan: FloorplanDto, maxW: number, maxH: number): Viewport {
  const scale = Math.min(maxW / plan.width_m, maxH / plan.height_m);
  return { scale, width: plan.width_m * scale, height: plan.height_m * scale };
}

/** World (meters, y up) -> canvas (pixels, y down). */
export function worldToScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [x * vp.scale, vp.height - y * vp.scale];
}

export function screenToWorld(vp: Viewport, px: number, py: number): [number, number] {
  return [px / vp.scale, (vp.height - py) / vp.scale];
}

function hatchPattern(ctx: CanvasRenderingContext2D): CanvasPattern | string {
  const tile = document.createElement("canvas");
  tile.width = tile.height = 8;
  const t = tile.getContext("2d");
  if (!t) return "#888";
  t.fillStyle = "#d9d9d9";
  t.fillRect(0, 0, 8, 8);
  t.strokeStyle = "#8a8a8a";
  t.beginPath();
  t.moveTo(-2, 10);
  t.lineTo(10, -2);
  t.stroke();
  return ctx.createPattern(tile, "repeat") ?? "#888";
}

export function drawHeatmap(
  canvas: HTMLCanvasElement,
  plan: FloorplanDto,
  payload: GridPayload,
  scale: ColorScale,
  beacons: BeaconDto[],
  selected: string | null,
): Viewport {
  const vp = fitViewport(plan, canvas.width, canvas.height);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const res = payload.resolution_m * vp.scale;
  const hatch = hatchPattern(ctx);
  for (const cell of heatmapCells(payload, scale)) {
    const [sx, sy] = worldToScreen(vp, cell.i * payload.resolution_m, (cell.j + 1) * payload.resolution_m);
    ctx.fillStyle = cell.color ?? hatch;
    ctx.fillRect(sx, sy, Math.ceil(res), Math.ceil(res));
  }

  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  ctx.strokeRect(0, vp.height - plan.height_m * vp.scale, plan.width_m * vp.scale, plan.height_m * vp.scale);

  for (const b of beacons) {
    const [sx, sy] = worldToScreen(vp, b.x_m, b.y_m);
    ctx.beginPath();
    ctx.arc(sx, sy, BEACON_RADIUS_PX, 0, 2 * Math.PI);
    ctx.fillStyle = b.id === selected ? "#ff8800" : "#ffffff";
    ctx.fill();
    ctx.strokeStyle = "#111";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
  return vp;
}

export function drawLegend(el: HTMLElement, scale: ColorScale, unit: string): void {
  const ticks = legendTicks(scale, 5);
  el.textContent = ticks.map((t) => `${t.toFixed(2)} ${unit}`).join("  |  ");
}

/** Polyline plot of up to three labeled series on a small canvas. */
export function drawCurves(
  canvas: HTMLCanvasElement,
  series: { label: string; color: string; values: (number | null)[] }[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const finite = series.flatMap((s) => s.values.filter((v): v is number => v !== null));
  if (!finite.length) return;
  const vMax = Math.max(...finite) * 1.05 || 1;
  const n = Math.max(...series.map((s) => s.values.length));
  const sx = canvas.width / Math.max(n - 1, 1);
  const sy = (v: number) => canvas.height - (v / vMax) * (canvas.height - 14) - 4;
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let pen = false;
    s.values.forEach((v, k) => {
      if (v === null) {
        pen = false;
        return;
      }
      const x = k * sx;
      if (pen) ctx.lineTo(x, sy(v));
      else ctx.moveTo(x, sy(v));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  series.forEach((s, k) => {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, 6 + 70 * k, 12);
  });
}

export function drawSparkline(canvas: HTMLCanvasElement, values: number[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (values.length < 2) return;
  const vMin = Math.min(...values);
  const vMax = Math.max(...values);
  const span = vMax - vMin || 1;
  ctx.strokeStyle = "#0a7";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  values.forEach((v, k) => {
    const x = (k / (values.length - 1)) * canvas.width;
    const y = canvas.height - ((v - vMin) / span) * (canvas.height - 4) - 2;
    if (k) ctx.lineTo(x, y);
    else ctx.moveTo(x, y);
  });
  ctx.stroke();
}
