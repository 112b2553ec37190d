/** Scriptable fetch for the UI tests: routes requests to canned handlers
 * and records every call so tests can assert exact request counts. */

import type { FetchLike } from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export type Handler = (body: unknown, url: string) => { status: number; json: unknown };

export interface Route {
  method: string;
  pattern: RegExp;
  handler: Handler;
}

export class FakeFetch {
  calls: RecordedCall[] = [];

  constructor(private routes: Route[]) {}

  count(method: string, pattern: RegExp): number {
    return this.calls.filter((c) => c.method === method && pattern.test(c.url)).length;
  }

  fn: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : null;
    this.calls.push({ method, url, body });
    for (const route of this.routes) {
      if (route.method === method && route.pattern.test(url)) {
        const { status, json } = route.handler(body, url);
        return Promise.resolve(
          new Response(JSON.stringify(json), {
            status,
            headers: { "content-type": "application/json" },
          }),
        );
      }
    }
    return Promise.reject(new Error(`no route for ${method} ${url}`));
  };
}

export function jsonFixture<T>(name: string): T {
  // eslint-disable-next-line @typescript-eslint/no-var-requires
  return structuredClone(FIXTURES[name]) as T;
}

import projectFixture from "./fixtures/project.json";
import projectAfterMove from "./fixtures/project_after_move.json";
import mapsRssError from "./fixtures/maps_rss_error.json";
import mapsStrength from "./fixtures/maps_strength.json";
import mapsAfterMove from "./fixtures/maps_after_move.json";
import putAck from "./fixtures/put_ack.json";
import curvesFixture from "./fixtures/curves.json";
import jobDone from "./fixtures/job_done.json";

const FIXTURES: Record<string, unknown> = {
  "project.json": projectFixture,
  "project_after_move.json": projectAfterMove,
  "maps_rss_error.json": mapsRssError,
  "maps_strength.json": mapsStrength,
  "maps_after_move.json": mapsAfterMove,
  "put_ack.json": putAck,
  "curves.json": curvesFixture,
  "job_done.json": jobDone,
};
