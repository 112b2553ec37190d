import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DragController, snapToFloorplan } from "../src/drag.js";
import { heatmapCells, scaleBounds } from "../src/heatmap.js";
import { MapLoader } from "../src/maploader.js";
import { Store, initialState } from "../src/state.js";
import type { BeaconDto, GridPayload, ProjectDoc } from "../src/types.js";
import { FakeFetch, jsonFixture } from "./helpers.js";
import type { Route } from "./helpers.js";

function loadedStore(): Store {
  const project = jsonFixture<ProjectDoc>("project.json");
  const store = new Store(initialState());
  store.update({
    projectId: project.id,
    projectVersion: project.version,
    floorplan: project.floorplan,
    beacons: project.beacons,
    layer: "rss_error",
    resolutionM: 2.0,
  });
  return store;
}

function happyRoutes(): Route[] {
  return [
    {
      method: "PUT",
      pattern: /\/beacons$/,
      handler: () => ({ status: 200, json: jsonFixture("put_ack.json") }),
    },
    {
      method: "POST",
      pattern: /\/maps$/,
      handler: () => ({ status: 200, json: jsonFixture("maps_after_move.json") }),
    },
  ];
}

function controller(fake: FakeFetch, store: Store, notes: string[] = []) {
  const api = new ApiClient("http://test", fake.fn);
  return new DragController(api, new MapLoader(api), store, (msg) => notes.push(msg));
}

describe("drop protocol", () => {
  it("issues exactly one PUT and one maps refresh", async () => {
    const fake = new FakeFetch(happyRoutes());
    const store = loadedStore();
    const drag = controller(fake, store);

    const result = await drag.drop("a", 12.0, 10.0);

    expect(result.outcome).toBe("committed");
    expect(fake.count("PUT", /\/beacons$/)).toBe(1);
    expect(fake.count("POST", /\/maps$/)).toBe(1);
    expect(fake.calls.length).toBe(2);
    // maps request goes out only after the PUT was acknowledged
    expect(fake.calls[0]!.method).toBe("PUT");
    expect(fake.calls[1]!.method).toBe("POST");
  });

  it("commits the server-acknowledged position and version", async () => {
    const fake = new FakeFetch(happyRoutes());
    const store = loadedStore();
    const drag = controller(fake, store);

    await drag.drop("a", 12.0, 10.0);

    const moved = store.state.beacons.find((b) => b.id === "a")!;
    expect(moved.x_m).toBe(12.0);
    expect(moved.y_m).toBe(10.0);
    expect(store.state.projectVersion).toBe(2); // ack fixture carries version 2
    const putBody = fake.calls[0]!.body as { version: number; beacons: BeaconDto[] };
    expect(putBody.version).toBe(1);
    expect(putBody.beacons.find((b) => b.id === "a")!.x_m).toBe(12.0);
  });

  it("refreshed heatmap equals the service payload cell for cell", async () => {
    const fake = new FakeFetch(happyRoutes());
    const store = loadedStore();
    const drag = controller(fake, store);

    const result = await drag.drop("a", 12.0, 10.0);
    const expected = jsonFixture<GridPayload>("maps_after_move.json");

    expect(result.map).not.toBeNull();
    const cells = heatmapCells(result.map!, scaleBounds(result.map!, false));
    expect(cells.map((c) => c.value)).toEqual(expected.values);
  });

  it("snaps drops outside the floorplan to the boundary", async () => {
    const fake = new FakeFetch(happyRoutes());
    const store = loadedStore();
    const drag = controller(fake, store);

    await drag.drop("a", -3.0, 99.0);

    const putBody = fake.calls[0]!.body as { beacons: BeaconDto[] };
    const sent = putBody.beacons.find((b) => b.id === "a")!;
    expect(sent.x_m).toBe(0);
    expect(sent.y_m).toBe(store.state.floorplan!.height_m);
  });

  it("409 reloads the project and shows the server position", async () => {
    const serverDoc = jsonFixture<ProjectDoc>("project_after_move.json");
    const notes: string[] = [];
    const fake = new FakeFetch([
      {
        method: "PUT",
        pattern: /\/beacons$/,
        handler: () => ({ status: 409, json: { detail: "version 1 is stale" } }),
      },
      {
        method: "GET",
        pattern: /\/projects\/[^/]+$/,
        handler: () => ({ status: 200, json: serverDoc }),
      },
      {
        method: "POST",
        pattern: /\/maps$/,
        handler: () => ({ status: 200, json: jsonFixture("maps_after_move.json") }),
      },
    ]);
    const store = loadedStore();
    const drag = controller(fake, store, notes);

    const result = await drag.drop("a", 33.0, 3.0);

    expect(result.outcome).toBe("conflict");
    const marker = store.state.beacons.find((b) => b.id === "a")!;
    const serverPos = serverDoc.beacons.find((b) => b.id === "a")!;
    expect(marker.x_m).toBe(serverPos.x_m); // server position, not the drop
    expect(marker.x_m).not.toBe(33.0);
    expect(store.state.projectVersion).toBe(serverDoc.version);
    expect(notes.length).toBe(1);
  });

  it("network failure reverts the marker and issues no refresh", async () => {
    const fake = new FakeFetch([]); // every request rejects
    const store = loadedStore();
    const before = store.state.beacons;
    const notes: string[] = [];
    const drag = controller(fake, store, notes);

    const result = await drag.drop("a", 12.0, 10.0);

    expect(result.outcome).toBe("failed");
    expect(store.state.beacons).toEqual(before);
    expect(store.state.projectVersion).toBe(1);
    expect(fake.count("POST", /\/maps$/)).toBe(0);
    expect(notes.length).toBe(1);
  });
});

describe("snapToFloorplan", () => {
  it("clamps into the rectangle inclusive of edges", () => {
    const plan = { width_m: 40, height_m: 20 };
    expect(snapToFloorplan(-1, -1, plan)).toEqual({ x: 0, y: 0 });
    expect(snapToFloorplan(41, 25, plan)).toEqual({ x: 40, y: 20 });
    expect(snapToFloorplan(12, 7, plan)).toEqual({ x: 12, y: 7 });
  });
});

describe("MapLoader latest-wins", () => {
  it("drops the stale in-flight response", async () => {
    let release: (() => void) | null = null;
    const slowThenFast: Route[] = [
      {
        method: "POST",
        pattern: /\/maps$/,
        handler: () => ({ status: 200, json: jsonFixture("maps_rss_error.json") }),
      },
    ];
    const fake = new FakeFetch(slowThenFast);
    const gated = async (url: string, init?: RequestInit) => {
      const resp = await fake.fn(url, init);
      if (release === null) {
        // first request: hold until the second finishes
        await new Promise<void>((resolve) => (release = resolve));
      }
      return resp;
    };
    const api = new ApiClient("http://test", gated);
    const loader = new MapLoader(api);

    const first = loader.load("p1", { kind: "rss_error", resolution_m: 2 });
    const second = await loader.load("p1", { kind: "rss_error", resolution_m: 1 });
    release!();
    const firstResult = await first;

    expect(second).not.toBeNull(); // newest request wins
    expect(firstResult).toBeNull(); // stale response dropped
  });
});
