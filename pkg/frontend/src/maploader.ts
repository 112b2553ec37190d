/** Latest-wins map fetching: at most one live request per layer; stale
 * responses are dropped by request token so a slow older refresh can
 * never overwrite a newer one. */

import type { ApiClient } from "./api.js";
import type { GridPayload, Layer, MapsRequest } from "./types.js";

export class MapLoader {
  private tokens = new Map<Layer, number>();

  constructor(private readonly api: ApiClient) {}

  /** Resolves with the payload, or null when a newer request for the
   * same layer was issued while this one was in flight. */
  async load(projectId: string, req: MapsRequest): Promise<GridPayload | null> {
    const token = (this.tokens.get(req.kind) ?? 0) + 1;
    this.tokens.set(req.kind, token);
    const payload = await this.api.maps(projectId, req);
    if (this.tokens.get(req.kind) !== token) return null;
    return payload;
  }
}
