/** Beacon drag protocol.
 *
 * No server calls happen mid-drag; on drop the controller issues exactly
 * one compare-and-set beacon replacement followed by exactly one refresh
 * of the active map layer. A position is only presented as committed
 * after the server acknowledged it; a version conflict reloads the
 * project (replaying nothing) and a network failure reverts the marker. */

import { ApiError } from "./api.js";
import type { ApiClient } from "./api.js";
import type { MapLoader } from "./maploader.js";
import type { Store } from "./state.js";
import type { BeaconDto, GridPayload } from "./types.js";

export interface DropOutcome {
  outcome: "committed" | "conflict" | "failed";
  /** marker position after the protocol finished (server truth) */
  beacons: BeaconDto[];
  map: GridPayload | null;
}

export type Notify = (message: string, kind: "info" | "error") => void;

export function snapToFloorplan(
  x: number,
  y: number,
  plan: { width_m: number; height_m: number },
): { x: number; y: number } {
  return {
    x: Math.min(Math.max(x, 0), plan.width_m),
    y: Math.min(Math.max(y, 0), plan.height_m),
  };
}

export class DragController {
  constructor(
    private readonly api: ApiClient,
    private readonly maps: MapLoader,
    private readonly store: Store,
    private readonly notify: Notify = () => {},
  ) {}

  async drop(beaconId: string, worldX: number, worldY: number): Promise<DropOutcome> {
    const state = this.store.state;
    if (!state.projectId || !state.floorplan) {
      throw new Error("no project loaded");
    }
    const snapped = snapToFloorplan(worldX, worldY, state.floorplan);
    const proposed = state.beacons.map((b) =>
      b.id === beaconId ? { ...b, x_m: snapped.x, y_m: snapped.y } : b,
    );

    let version: number;
    try {
      const ack = await this.api.putBeacons(state.projectId, state.projectVersion, proposed);
      version = ack.version;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // somebody else moved first: adopt the server's layout wholesale
        const server = await this.api.getProject(state.projectId);
        this.store.update({ beacons: server.beacons, projectVersion: server.version });
        this.notify("beacon layout changed elsewhere; reloaded the server state", "error");
        const map = await this.refresh();
        return { outcome: "conflict", beacons: server.beacons, map };
      }
      this.notify(`move failed: ${err instanceof Error ? err.message : err}`, "error");
      return { outcome: "failed", beacons: state.beacons, map: null };
    }

    this.store.update({ beacons: proposed, projectVersion: version });
    const map = await this.refresh();
    return { outcome: "committed", beacons: proposed, map };
  }

  private async refresh(): Promise<GridPayload | null> {
    const { projectId, layer, resolutionM } = this.store.state;
    if (!projectId) return null;
    return this.maps.load(projectId, { kind: layer, resolution_m: resolutionM });
  }
}
