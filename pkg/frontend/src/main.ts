/** Entry point: wires the pure modules to the DOM. All model numbers come
 * from server payloads; this file only routes events and repaints. */

import { ApiClient, ApiError } from "./api.js";
import { scaleBounds, PayloadMismatchError } from "./heatmap.js";
import { MapLoader } from "./maploader.js";
import { Store } from "./state.js";
import { DragController } from "./drag.js";
import { OptimizePanel } from "./optimize.js";
import { toSeries, trajectoryError, fusedDominates } from "./curves.js";
import {
  BEACON_RADIUS_PX,
  drawCurves,
  drawHeatmap,
  drawLegend,
  drawSparkline,
  fitViewport,
  screenToWorld,
  worldToScreen,
} from "./render.js";
import type { GridPayload, Layer } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const apiBase = new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8080";
const api = new ApiClient(apiBase);
const store = new Store();
const maps = new MapLoader(api);

const banner = $("banner");
function notify(message: string, kind: "info" | "error"): void {
  banner.textContent = message;
  banner.className = kind;
  banner.style.display = message ? "block" : "none";
  if (kind === "info") setTimeout(() => (banner.style.display = "none"), 4000);
}

const drag = new DragController(api, maps, store, notify);
const optimizer = new OptimizePanel(api, maps, store);

const canvas = $("floor") as unknown as HTMLCanvasElement;
const legend = $("legend");
const curvesCanvas = $("curves") as unknown as HTMLCanvasElement;
const sparkCanvas = $("sparkline") as unknown as HTMLCanvasElement;

let lastPayload: GridPayload | null = null;

function repaint(): void {
  const { floorplan, beacons, selectedBeacon, autoScale } = store.state;
  if (!floorplan || !lastPayload) return;
  try {
    const scale = scaleBounds(lastPayload, autoScale);
    store.state.scale = scale;
    drawHeatmap(canvas, floorplan, lastPayload, scale, beacons, selectedBeacon);
    drawLegend(legend, scale, lastPayload.unit);
  } catch (err) {
    if (err instanceof PayloadMismatchError) notify(err.message, "error");
    else throw err;
  }
}

async function refreshMap(): Promise<void> {
  const { projectId, layer, resolutionM } = store.state;
  if (!projectId) return;
  try {
    const payload = await maps.load(projectId, { kind: layer, resolution_m: resolutionM });
    if (payload) {
      lastPayload = payload;
      repaint();
    }
  } catch (err) {
    notify(`map request failed: ${err instanceof Error ? err.message : err}`, "error");
  }
}

async function loadProject(id: string): Promise<void> {
  const doc = await api.getProject(id);
  store.update({
    projectId: doc.id,
    projectVersion: doc.version,
    floorplan: doc.floorplan,
    beacons: doc.beacons,
    resolutionM: doc.grid.resolution_m,
  });
  notify(`loaded project ${doc.name}`, "info");
  await refreshMap();
}

// --- layer and resolution controls -----------------------------------------

$("layer").addEventListener("change", (e) => {
  store.update({ layer: (e.target as HTMLSelectElement).value as Layer });
  void refreshMap();
});
$("resolution").addEventListener("change", (e) => {
  const v = Number((e.target as HTMLInputElement).value);
  if (v > 0) {
    store.update({ resolutionM: v });
    void refreshMap();
  }
});
$("autoscale").addEventListener("change", (e) => {
  store.update({ autoScale: (e.target as HTMLInputElement).checked });
  repaint();
});
$("load").addEventListener("click", () => {
  const id = ($("project-id") as unknown as HTMLInputElement).value.trim();
  if (id) void loadProject(id).catch((err) => notify(String(err), "error"));
});

// --- beacon dragging ---------------------------------------------------------

let dragging: string | null = null;

canvas.addEventListener("pointerdown", (e) => {
  const { floorplan, beacons } = store.state;
  if (!floorplan) return;
  const vp = fitViewport(floorplan, canvas.width, canvas.height);
  const rect = canvas.getBoundingClientRect();
  const px = e.clientX - rect.left;
  const py = e.clientY - rect.top;
  for (const b of beacons) {
    const [sx, sy] = worldToScreen(vp, b.x_m, b.y_m);
    if (Math.hypot(sx - px, sy - py) <= BEACON_RADIUS_PX + 3) {
      dragging = b.id;
      store.update({ selectedBeacon: b.id });
      canvas.setPointerCapture(e.pointerId);
      repaint();
      return;
    }
  }
});

canvas.addEventListener("pointermove", (e) => {
  if (!dragging) return;
  const { floorplan } = store.state;
  if (!floorplan) return;
  const vp = fitViewport(floorplan, canvas.width, canvas.height);
  const rect = canvas.getBoundingClientRect();
  const [wx, wy] = screenToWorld(vp, e.clientX - rect.left, e.clientY - rect.top);
  // local-only preview while dragging; the server call happens on drop
  store.update({
    beacons: store.state.beacons.map((b) =>
      b.id === dragging ? { ...b, x_m: wx, y_m: wy } : b,
    ),
  });
  repaint();
});

canvas.addEventListener("pointerup", (e) => {
  if (!dragging) return;
  const id = dragging;
  dragging = null;
  const { floorplan } = store.state;
  if (!floorplan) return;
  const vp = fitViewport(floorplan, canvas.width, canvas.height);
  const rect = canvas.getBoundingClientRect();
  const [wx, wy] = screenToWorld(vp, e.clientX - rect.left, e.clientY - rect.top);
  void drag.drop(id, wx, wy).then((result) => {
    if (result.map) {
      lastPayload = result.map;
    }
    repaint();
  });
});

// --- curves panel ------------------------------------------------------------

$("curves-run").addEventListener("click", () => {
  void (async () => {
    const { projectId, floorplan } = store.state;
    if (!projectId || !floorplan) return;
    const startX = Number(($("cx") as unknown as HTMLInputElement).value);
    const startY = Number(($("cy") as unknown as HTMLInputElement).value);
    const heading = Number(($("heading") as unknown as HTMLInputElement).value);
    const steps = Number(($("steps") as unknown as HTMLInputElement).value);
    const inline = $("curves-error");
    const problem = trajectoryError(floorplan, startX, startY, heading, steps, 0.625);
    if (problem) {
      inline.textContent = problem;
      return;
    }
    inline.textContent = "";
    try {
      const payload = await api.curves(projectId, { start: [startX, startY], heading, steps });
      if (!fusedDominates(payload.rows)) {
        notify("server payload violated fusion dominance", "error");
      }
      const s = toSeries(payload);
      drawCurves(curvesCanvas, [
        { label: "rss", color: "#c22", values: s.rss },
        { label: "pdr", color: "#26c", values: s.pdr },
        { label: "fused", color: "#082", values: s.fused },
      ]);
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) inline.textContent = err.message;
      else notify(String(err), "error");
    }
  })();
});

// --- optimize panel ----------------------------------------------------------

const startBtn = $("opt-start") as unknown as HTMLButtonElement;
const applyBtn = $("opt-apply") as unknown as HTMLButtonElement;

startBtn.addEventListener("click", () => {
  if (optimizer.running) return;
  startBtn.disabled = true;
  applyBtn.disabled = true;
  const overrides = {
    max_evals: Number(($("opt-evals") as unknown as HTMLInputElement).value) || 2000,
    seed: Number(($("opt-seed") as unknown as HTMLInputElement).value) || 0,
  };
  const ticker = setInterval(() => drawSparkline(sparkCanvas, optimizer.sparkline), 300);
  void optimizer
    .start(overrides)
    .then((job) => {
      if (job?.state === "FAILED") notify(`optimization failed: ${job.error}`, "error");
      if (job?.state === "DONE") {
        applyBtn.disabled = false;
        $("opt-status").textContent =
          `best ${job.result?.best_objective.toFixed(3)} m after ${job.result?.evals_used} evals`;
      }
    })
    .catch((err) => notify(String(err), "error"))
    .finally(() => {
      clearInterval(ticker);
      drawSparkline(sparkCanvas, optimizer.sparkline);
      startBtn.disabled = false;
    });
});

applyBtn.addEventListener("click", () => {
  void optimizer
    .applyBest()
    .then((map) => {
      if (map) {
        lastPayload = map;
        repaint();
        notify("applied best layout", "info");
      }
    })
    .catch((err) => notify(String(err), "error"));
});

store.subscribe(() => {
  /* panels pull state on demand; a global subscription keeps the beacon
   * list box in sync */
  $("beacon-list").textContent = store.state.beacons
    .map((b) => `${b.id} (${b.x_m.toFixed(1)}, ${b.y_m.toFixed(1)})`)
    .join("\n");
});

notify("enter a project id and press load", "info");
