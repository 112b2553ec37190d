/** Optimize panel logic: start a job (one per project), poll it, keep a
 * live best-objective sparkline, and apply the winning layout through the
 * same CAS beacon replacement the drag path uses. */

import type { ApiClient } from "./api.js";
import type { MapLoader } from "./maploader.js";
import type { Store } from "./state.js";
import type { GridPayload, JobPayload, OptimizeOverrides } from "./types.js";

export type Sleep = (ms: number) => Promise<void>;

const defaultSleep: Sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

/** Downsample a job history's best column to at most maxPoints values;
 * the series stays nonincreasing because "best" is. */
export function sparklineFromHistory(
  history: [number, number, number, number][],
  maxPoints = 256,
): number[] {
  if (history.length <= maxPoints) return history.map((row) => row[2]);
  const out: number[] = [];
  for (let k = 0; k < maxPoints; k++) {
    const idx = Math.floor((k * (history.length - 1)) / (maxPoints - 1));
    out.push(history[idx]![2]);
  }
  return out;
}

export class OptimizePanel {
  running = false;
  jobId: string | null = null;
  sparkline: number[] = [];
  lastJob: JobPayload | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly maps: MapLoader,
    private readonly store: Store,
    private readonly sleep: Sleep = defaultSleep,
    private readonly pollMs = 250,
  ) {}

  /** Start button contract: disabled (no-op, no request) while a job for
   * this project is running. Resolves with the terminal job payload. */
  async start(overrides: OptimizeOverrides): Promise<JobPayload | null> {
    if (this.running) return null;
    const { projectId } = this.store.state;
    if (!projectId) throw new Error("no project loaded");
    this.running = true;
    this.sparkline = [];
    try {
      const { job_id } = await this.api.optimize(projectId, overrides);
      this.jobId = job_id;
      this.store.update({ jobId: job_id });
      let job = await this.api.job(job_id);
      this.record(job);
      while (job.state === "QUEUED" || job.state === "RUNNING") {
        await this.sleep(this.pollMs);
        job = await this.api.job(job_id);
        this.record(job);
      }
      if (job.state === "DONE" && job.result) {
        this.sparkline = sparklineFromHistory(job.result.history);
      }
      this.lastJob = job;
      return job;
    } finally {
      this.running = false;
    }
  }

  private record(job: JobPayload): void {
    if (job.best_objective !== null) {
      const prev = this.sparkline[this.sparkline.length - 1];
      // live polls may arrive out of order only in tests with fake timers;
      // clamp so the displayed series never rises
      this.sparkline.push(prev === undefined ? job.best_objective : Math.min(prev, job.best_objective));
    }
  }

  /** Replace the project's beacons with the job's best layout (CAS PUT),
   * then refresh the active map layer. */
  async applyBest(): Promise<GridPayload | null> {
    const job = this.lastJob;
    if (!job || job.state !== "DONE" || !job.result) {
      throw new Error("no finished job to apply");
    }
    const { projectId, projectVersion, layer, resolutionM } = this.store.state;
    if (!projectId) throw new Error("no project loaded");
    const beacons = job.result.best_layout.beacons;
    const ack = await this.api.putBeacons(projectId, projectVersion, beacons);
    this.store.update({ beacons, projectVersion: ack.version });
    return this.maps.load(projectId, { kind: layer, resolution_m: resolutionM });
  }
}
