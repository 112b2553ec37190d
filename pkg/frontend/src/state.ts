/** View state and a tiny observable store: one source of truth for what
 * the panels render. Layer and resolution always reflect the last server
 * response that was drawn. */

import type { BeaconDto, FloorplanDto, Layer } from "./types.js";
import type { ColorScale } from "./heatmap.js";
import { LAYER_SCALES } from "./heatmap.js";

export interface ViewState {
  projectId: string | null;
  projectVersion: number;
  floorplan: FloorplanDto | null;
  beacons: BeaconDto[];
  layer: Layer;
  resolutionM: number;
  selectedBeacon: string | null;
  jobId: string | null;
  autoScale: boolean;
  scale: ColorScale;
}

export function initialState(): ViewState {
  return {
    projectId: null,
    projectVersion: 0,
    floorplan: null,
    beacons: [],
    layer: "strength",
    resolutionM: 0.5,
    selectedBeacon: null,
    jobId: null,
    autoScale: false,
    scale: LAYER_SCALES.strength,
  };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private listeners: Listener[] = [];
  constructor(public state: ViewState = initialState()) {}

  update(patch: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}
