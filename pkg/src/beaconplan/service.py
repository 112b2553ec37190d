"""HTTP JSON API for the planner UI and scripts.

Design: one document per project in a data directory (no database);
project mutation is optimistic-concurrency (compare-and-set on an integer
version); map and curve requests are synchronous pure functions of the
project state; optimization runs as an asynchronous job polled by the
client, at most one per project.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, replace
from typing import Optional

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import errormap
from .anneal import SaResult, anneal
from .fusion import fused_curve
from .geometry import GridSpec, NoInformationError, Point2, Trajectory
from .project import (
    Project,
    ProjectValidationError,
    _integer,
    _number,
    export_project,
    load_project_file,
    new_ulid,
    parse_beacons,
    parse_optimize_section,
    parse_project,
    save_project,
    touch,
)

DATA_DIR_ENV = "BEACONPLAN_DATA"
DEFAULT_DATA_DIR = "beaconplan_data"


class UnknownIdError(KeyError):
    pass


class VersionConflictError(RuntimeError):
    pass


class JobConflictError(RuntimeError):
    pass


class ProjectStore:
    """In-memory project registry backed by one canonical JSON file each."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._lock = threading.Lock()
        self._projects: dict = {}
        for name in sorted(os.listdir(data_dir)):
            if name.endswith(".json"):
                p = load_project_file(os.path.join(data_dir, name), assign_id=False)
                self._projects[p.id] = p

    def _persist(self, p: Project) -> None:
        save_project(p, os.path.join(self.data_dir, f"{p.id}.json"))

    def create(self, doc: dict) -> Project:
        p = parse_project(doc, assign_id=True)
        with self._lock:
            if p.id in self._projects:
                p = replace(p, id=new_ulid())
            self._projects[p.id] = p
            self._persist(p)
        return p

    def get(self, pid: str) -> Project:
        with self._lock:
            if pid not in self._projects:
                raise UnknownIdError(pid)
            return self._projects[pid]

    def replace_beacons(self, pid: str, base_version: int, beacons_obj) -> Project:
        with self._lock:
            if pid not in self._projects:
                raise UnknownIdError(pid)
            p = self._projects[pid]
            if base_version != p.version:
                raise VersionConflictError(
                    f"version {base_version} is stale, project is at {p.version}"
                )
            layout = parse_beacons(beacons_obj, p.floorplan)
            updated = touch(replace(p, layout=layout))
            self._projects[pid] = updated
            self._persist(updated)
            return updated


@dataclass
class Job:
    id: str
    project_id: str
    kind: str = "optimize"
    state: str = "QUEUED"  # QUEUED -> RUNNING -> DONE | FAILED
    evals_used: int = 0
    max_evals: int = 0
    best_objective: Optional[float] = None
    result: Optional[SaResult] = None
    error: Optional[str] = None


class JobManager:
    """Runs optimize jobs off the request path; readers poll snapshots."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict = {}
        self._active: dict = {}  # project id -> job id

    def start(self, project: Project, cfg) -> Job:
        with self._lock:
            active = self._active.get(project.id)
            if active is not None and self._jobs[active].state in ("QUEUED", "RUNNING"):
                raise JobConflictError(f"job {active} already running for project {project.id}")
            job = Job(id=new_ulid(), project_id=project.id, max_evals=cfg.max_evals)
            self._jobs[job.id] = job
            self._active[project.id] = job.id

        def progress(evals_used: int, best: float) -> None:
            with self._lock:
                job.evals_used = evals_used
                job.best_objective = best

        def run() -> None:
            with self._lock:
                job.state = "RUNNING"
            try:
                grid = GridSpec.for_floorplan(project.floorplan, project.grid_resolution)
                result = anneal(
                    project.channel,
                    project.floorplan,
                    grid,
                    cfg,
                    pdr_params=project.pdr,
                    progress=progress,
                )
            except Exception as e:  # surfaced to the client as FAILED
                with self._lock:
                    job.state = "FAILED"
                    job.error = str(e)
                return
            with self._lock:
                job.result = result
                job.evals_used = result.evals_used
                job.best_objective = result.best_objective
                job.state = "DONE"

        threading.Thread(target=run, daemon=True).start()
        return job

    def snapshot(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise UnknownIdError(job_id)
            job = self._jobs[job_id]
            payload = {
                "id": job.id,
                "project_id": job.project_id,
                "kind": job.kind,
                "state": job.state,
                "progress": {"evals_used": job.evals_used, "max_evals": job.max_evals},
                "best_objective": job.best_objective,
                "error": job.error,
                "result": None,
            }
            if job.result is not None:
                r = job.result
                payload["result"] = {
                    "best_objective": r.best_objective,
                    "evals_used": r.evals_used,
                    "best_layout": {
                        "beacons": [
                            {"id": b.id, "x_m": b.position.x, "y_m": b.position.y}
                            for b in r.best_layout.beacons
                        ]
                    },
                    "history": [
                        [h.eval_index, h.current, h.best, h.temperature] for h in r.history
                    ],
                }
            return payload


def _nullify(value: float):
    return None if math.isinf(value) else value


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    data_dir = data_dir or os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR)
    store = ProjectStore(data_dir)
    jobs = JobManager()

    app = FastAPI(title="beaconplan", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.jobs = jobs

    @app.exception_handler(ProjectValidationError)
    def _validation_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    def _request_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(NoInformationError)
    def _no_info(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnknownIdError)
    def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"detail": f"unknown id {exc.args[0]}"})

    @app.exception_handler(VersionConflictError)
    def _conflict(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(JobConflictError)
    def _job_conflict(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/projects")
    def create_project(body: dict):
        p = store.create(body)
        return {"id": p.id, "version": p.version}

    @app.get("/api/projects/{pid}")
    def get_project(pid: str):
        from .project import to_document

        return to_document(store.get(pid))

    @app.get("/api/projects/{pid}/export")
    def export(pid: str):
        return Response(content=export_project(store.get(pid)), media_type="application/json")

    @app.put("/api/projects/{pid}/beacons")
    def put_beacons(pid: str, body: dict):
        version = _integer(body, "", "version", required=True)
        if "beacons" not in body:
            raise ProjectValidationError("beacons: missing required field")
        p = store.replace_beacons(pid, version, body["beacons"])
        return {"version": p.version}

    @app.post("/api/projects/{pid}/maps")
    def maps(pid: str, body: dict):
        p = store.get(pid)
        kind = body.get("kind")
        if kind not in errormap.MAP_KINDS:
            raise ProjectValidationError(
                f"kind: must be one of {list(errormap.MAP_KINDS)}, got {kind!r}"
            )
        resolution = _number(body, "", "resolution_m", default=p.grid_resolution)
        if not resolution > 0:
            raise ProjectValidationError(f"resolution_m: must be positive, got {resolution}")
        grid = GridSpec.for_floorplan(p.floorplan, resolution)
        if kind == errormap.MAP_STRENGTH:
            emap = errormap.strength_map(p.channel, p.layout, grid)
        elif kind == errormap.MAP_RSS_ERROR:
            emap = errormap.rss_error_map(p.channel, p.layout, grid)
        else:
            mode = body.get("pdr_mode", errormap.PDR_MODE_DISTANCE)
            if mode not in errormap.PDR_MODES:
                raise ProjectValidationError(
                    f"pdr_mode: must be one of {list(errormap.PDR_MODES)}, got {mode!r}"
                )
            horizon = _integer(body, "", "horizon_steps", default=errormap.DEFAULT_HORIZON)
            if horizon < 1:
                raise ProjectValidationError(f"horizon_steps: must be >= 1, got {horizon}")
            emap = errormap.fused_error_map(p.channel, p.layout, grid, p.pdr, mode, horizon)
        bounded = emap.values[emap.bounded_mask()]
        return {
            "kind": kind,
            "unit": emap.unit,
            "nx": grid.nx,
            "ny": grid.ny,
            "resolution_m": grid.resolution,
            "project_version": p.version,
            "min": float(bounded.min()) if bounded.size else None,
            "max": float(bounded.max()) if bounded.size else None,
            "values": [_nullify(float(v)) for v in emap.values],
        }

    @app.post("/api/projects/{pid}/curves")
    def curves(pid: str, body: dict):
        p = store.get(pid)
        start = body.get("start")
        if not isinstance(start, (list, tuple)) or len(start) != 2:
            raise ProjectValidationError("start: expected [x_m, y_m]")
        heading = _number(body, "", "heading", required=True)
        steps = _integer(body, "", "steps", required=True)
        try:
            traj = Trajectory(
                start=Point2(float(start[0]), float(start[1])),
                heading=heading,
                step_count=steps,
            )
            rows = fused_curve(p.channel, p.layout, traj, p.pdr)
        except ValueError as e:
            raise ProjectValidationError(str(e)) from e
        return {
            "project_version": p.version,
            "rows": [
                {
                    "step": r.step,
                    "rss_rmse_m": _nullify(r.rss_rmse),
                    "pdr_rmse_m": _nullify(r.pdr_rmse),
                    "fused_rmse_m": _nullify(r.fused_rmse),
                }
                for r in rows
            ],
        }

    @app.post("/api/projects/{pid}/optimize")
    def optimize(pid: str, body: dict):
        p = store.get(pid)
        cfg = parse_optimize_section(body, base=p.optimize)
        job = jobs.start(p, cfg)
        return {"job_id": job.id}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return jobs.snapshot(job_id)

    return app
