"""Batch command line: simulate, optimize, curves, validate, serve.

Exit codes: 0 success, 1 usage, 2 validation, 3 runtime. Diagnostics go
to stderr; result files are written under --out (default: current
directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

from . import errormap, montecarlo
from .anneal import anneal, write_history_csv
from .fusion import fused_curve, write_curve_csv
from .geometry import GridSpec, NoInformationError, Point2, Trajectory, write_grid_csv
from .project import ProjectValidationError, canonical_json, load_project_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract
    # reserves 2 for validation failures and uses 1 for usage.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beaconplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="project JSON file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("--grid-res", type=float, default=None, help="grid resolution in meters")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("simulate", help="write strength / rss_error / fused_error grids")
    common(p)
    p.add_argument("--pdr-mode", choices=list(errormap.PDR_MODES), default=errormap.PDR_MODE_DISTANCE)
    p.add_argument("--horizon-steps", type=int, default=errormap.DEFAULT_HORIZON)

    p = sub.add_parser("optimize", help="anneal beacon positions, write best layout + history")
    common(p)

    p = sub.add_parser("curves", help="three-model error curves along a trajectory")
    common(p)
    p.add_argument("--start", required=True, help="trajectory start as x,y (meters)")
    p.add_argument("--heading", type=float, required=True, help="heading in radians")
    p.add_argument("--steps", type=int, required=True, help="number of steps")

    p = sub.add_parser("validate", help="Monte-Carlo model-vs-empirical report")
    common(p)
    p.add_argument("--start", required=True, help="trajectory start as x,y (meters)")
    p.add_argument("--heading", type=float, required=True, help="heading in radians")
    p.add_argument("--steps", type=int, required=True, help="number of steps")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=list(montecarlo.MODES), default=montecarlo.MODE_WALK)
    p.add_argument("--step-sigma", type=float, default=None,
                   help="per-step length noise std (default: the project's sigma_sn)")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="project storage directory")

    return parser


def _parse_start(text: str) -> Point2:
    parts = text.split(",")
    if len(parts) != 2:
        raise ProjectValidationError(f"--start expects x,y; got {text!r}")
    try:
        return Point2(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise ProjectValidationError(f"--start: {e}") from e


def _grid_payload(grid) -> dict:
    return {
        "unit": grid.unit,
        "nx": grid.spec.nx,
        "ny": grid.spec.ny,
        "resolution_m": grid.spec.resolution,
        "values": [None if math.isinf(v) else float(v) for v in grid.values],
    }


def _write_grid(out_dir: str, name: str, grid, fmt: str) -> str:
    if fmt == "json":
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fp:
            json.dump(_grid_payload(grid), fp)
            fp.write("\n")
    else:
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fp:
            write_grid_csv(fp, grid)
    return path


def _cmd_simulate(args) -> int:
    project = load_project_file(args.config)
    res = args.grid_res if args.grid_res is not None else project.grid_resolution
    grid = GridSpec.for_floorplan(project.floorplan, res)
    os.makedirs(args.out, exist_ok=True)
    strength = errormap.strength_map(project.channel, project.layout, grid)
    rss = errormap.rss_error_map(project.channel, project.layout, grid)
    fused = errormap.fused_error_map(
        project.channel, project.layout, grid, project.pdr, args.pdr_mode, args.horizon_steps
    )
    for name, g in (("strength", strength), ("rss_error", rss), ("fused_error", fused)):
        path = _write_grid(args.out, name, g, args.format)
        print(path)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    project = load_project_file(args.config)
    cfg = project.optimize
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    res = args.grid_res if args.grid_res is not None else project.grid_resolution
    grid = GridSpec.for_floorplan(project.floorplan, res)
    result = anneal(project.channel, project.floorplan, grid, cfg, pdr_params=project.pdr)
    os.makedirs(args.out, exist_ok=True)
    layout_path = os.path.join(args.out, "best_layout.json")
    with open(layout_path, "w", encoding="utf-8") as fp:
        fp.write(
            canonical_json(
                {
                    "best_objective_m": result.best_objective,
                    "evals_used": result.evals_used,
                    "beacons": [
                        {"id": b.id, "x_m": b.position.x, "y_m": b.position.y}
                        for b in result.best_layout.beacons
                    ],
                }
            )
        )
    history_path = os.path.join(args.out, "history.csv")
    with open(history_path, "w", encoding="utf-8", newline="") as fp:
        write_history_csv(fp, result)
    print(layout_path)
    print(history_path)
    return EXIT_OK


def _cmd_curves(args) -> int:
    project = load_project_file(args.config)
    traj = Trajectory(start=_parse_start(args.start), heading=args.heading, step_count=args.steps)
    rows = fused_curve(project.channel, project.layout, traj, project.pdr)
    os.makedirs(args.out, exist_ok=True)
    if args.format == "json":
        path = os.path.join(args.out, "curves.json")
        with open(path, "w", encoding="utf-8") as fp:
            json.dump(
                {
                    "rows": [
                        {
                            "step": r.step,
                            "rss_rmse_m": None if math.isinf(r.rss_rmse) else r.rss_rmse,
                            "pdr_rmse_m": r.pdr_rmse,
                            "fused_rmse_m": None if math.isinf(r.fused_rmse) else r.fused_rmse,
                        }
                        for r in rows
                    ]
                },
                fp,
            )
            fp.write("\n")
    else:
        path = os.path.join(args.out, "curves.csv")
        with open(path, "w", encoding="utf-8", newline="") as fp:
            write_curve_csv(fp, rows)
    print(path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    project = load_project_file(args.config)
    traj = Trajectory(start=_parse_start(args.start), heading=args.heading, step_count=args.steps)
    seed = args.seed if args.seed is not None else project.optimize.seed
    step_sigma = args.step_sigma if args.step_sigma is not None else project.pdr.sigma_sn
    sim = montecarlo.SimConfig(
        trials=args.trials, seed=seed, trajectory=traj, step_sigma=step_sigma
    )
    report = montecarlo.validate_fusion(
        project.channel, project.layout, traj, project.pdr, sim, mode=args.mode
    )
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "validation.csv")
    with open(path, "w", encoding="utf-8", newline="") as fp:
        montecarlo.write_report_csv(fp, report)
    print(path)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    handlers = {
        "simulate": _cmd_simulate,
        "optimize": _cmd_optimize,
        "curves": _cmd_curves,
        "validate": _cmd_validate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except NoInformationError as e:
        print(f"beaconplan: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ProjectValidationError, FileNotFoundError, ValueError) as e:
        print(f"beaconplan: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"beaconplan: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
