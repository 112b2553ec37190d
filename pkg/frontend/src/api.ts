/** Thin typed client over the planner HTTP API.
 *
 * The fetch implementation is injected so tests can count and script
 * requests; no endpoint result is cached here (the latest-wins logic for
 * map refreshes lives in MapLoader). */

import type {
  CurvesPayload,
  CurvesRequest,
  GridPayload,
  JobPayload,
  MapsRequest,
  OptimizeOverrides,
  ProjectDoc,
  BeaconDto,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  health(): Promise<{ status: string }> {
    return this.fetchFn(`${this.baseUrl}/api/health`).then((r) => parse(r));
  }

  getProject(id: string): Promise<ProjectDoc> {
    return this.fetchFn(`${this.baseUrl}/api/projects/${id}`).then((r) => parse(r));
  }

  createProject(doc: unknown): Promise<{ id: string; version: number }> {
    return this.post("/api/projects", doc);
  }

  putBeacons(
    id: string,
    version: number,
    beacons: BeaconDto[],
  ): Promise<{ version: number }> {
    return this.fetchFn(`${this.baseUrl}/api/projects/${id}/beacons`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ version, beacons }),
    }).then((r) => parse(r));
  }

  maps(id: string, req: MapsRequest): Promise<GridPayload> {
    return this.post(`/api/projects/${id}/maps`, req);
  }

  curves(id: string, req: CurvesRequest): Promise<CurvesPayload> {
    return this.post(`/api/projects/${id}/curves`, req);
  }

  optimize(id: string, overrides: OptimizeOverrides): Promise<{ job_id: string }> {
    return this.post(`/api/projects/${id}/optimize`, overrides);
  }

  job(jobId: string): Promise<JobPayload> {
    return this.fetchFn(`${this.baseUrl}/api/jobs/${jobId}`).then((r) => parse(r));
  }
}
