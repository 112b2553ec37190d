"""Project document: validation, canonical serialization, persistence.

One JSON document per project. Serialization is canonical — fixed key
order, 9-significant-digit floats, 2-space indent — so that
export -> import -> export round-trips byte-identically.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, replace
from typing import Optional

from .anneal import OBJECTIVES, SaConfig
from .geometry import Beacon, BeaconLayout, Floorplan, Point2, fmt9
from .pdr import SN_SCALINGS, PdrParams
from .rss import ChannelModel

FORMAT_VERSION = 1

DEFAULT_GRID_RESOLUTION = 0.5  # m, display resolution
DEFAULT_PDR = PdrParams(step_length=0.625, dmax=0.0283, sigma_sn=0.0446)


class ProjectValidationError(ValueError):
    """A project document violated the schema; message names the field path."""


@dataclass
class Project:
    id: str
    name: str
    created_utc: int
    modified_utc: int
    version: int
    floorplan: Floorplan
    channel: ChannelModel
    pdr: PdrParams
    grid_resolution: float
    layout: BeaconLayout
    optimize: SaConfig


_B32 = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def new_ulid() -> str:
    """Sortable 26-char id: 48-bit ms timestamp + 80 random bits, Crockford base32."""
    ts = int(time.time() * 1000) & ((1 << 48) - 1)
    value = (ts << 80) | int.from_bytes(os.urandom(10), "big")
    return "".join(_B32[(value >> shift) & 31] for shift in range(125, -1, -5))


# --- validation helpers ------------------------------------------------------


def _fail(path: str, message: str):
    raise ProjectValidationError(f"{path}: {message}")


def _check_keys(obj: dict, path: str, allowed: tuple):
    for key in obj:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _number(obj: dict, path: str, key: str, default=None, required=False) -> Optional[float]:
    if key not in obj:
        if required:
            _fail(f"{path}.{key}", "missing required field")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{path}.{key}", f"expected a number, got {type(v).__name__}")
    if not math.isfinite(v):
        _fail(f"{path}.{key}", "must be finite")
    return float(v)


def _integer(obj: dict, path: str, key: str, default=None, required=False) -> Optional[int]:
    if key not in obj:
        if required:
            _fail(f"{path}.{key}", "missing required field")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}", f"expected an integer, got {type(v).__name__}")
    return v


def _string(obj: dict, path: str, key: str, default=None, required=False, choices=None):
    if key not in obj:
        if required:
            _fail(f"{path}.{key}", "missing required field")
        return default
    v = obj[key]
    if not isinstance(v, str):
        _fail(f"{path}.{key}", f"expected a string, got {type(v).__name__}")
    if choices is not None and v not in choices:
        _fail(f"{path}.{key}", f"must be one of {list(choices)}, got {v!r}")
    return v


def _wrap(path: str, build):
    try:
        return build()
    except ProjectValidationError:
        raise
    except ValueError as e:
        _fail(path, str(e))


# --- document -> Project ------------------------------------------------------


def parse_project(doc: dict, assign_id: bool = False) -> Project:
    """Validate a parsed document and build a Project, filling defaults.

    ``assign_id`` mints id/timestamps/version for documents arriving
    without them (e.g. POST bodies); otherwise those fields are required.
    """
    if not isinstance(doc, dict):
        raise ProjectValidationError(f"document root must be an object, got {type(doc).__name__}")
    _check_keys(
        doc,
        "",
        (
            "format_version",
            "id",
            "name",
            "created_utc",
            "modified_utc",
            "version",
            "floorplan",
            "channel",
            "pdr",
            "grid",
            "beacons",
            "optimize",
        ),
    )
    fv = _integer(doc, "", "format_version", default=FORMAT_VERSION)
    if fv != FORMAT_VERSION:
        _fail("format_version", f"unsupported version {fv}, expected {FORMAT_VERSION}")

    now = int(time.time())
    if assign_id:
        pid = _string(doc, "", "id", default=new_ulid())
        created = _integer(doc, "", "created_utc", default=now)
        modified = _integer(doc, "", "modified_utc", default=now)
        version = _integer(doc, "", "version", default=1)
    else:
        pid = _string(doc, "", "id", required=True)
        created = _integer(doc, "", "created_utc", required=True)
        modified = _integer(doc, "", "modified_utc", required=True)
        version = _integer(doc, "", "version", required=True)
    name = _string(doc, "", "name", default="untitled")

    if "floorplan" not in doc:
        _fail("floorplan", "missing required section")
    fp_obj = doc["floorplan"]
    if not isinstance(fp_obj, dict):
        _fail("floorplan", "expected an object")
    _check_keys(fp_obj, "floorplan", ("width_m", "height_m"))
    floorplan = _wrap(
        "floorplan",
        lambda: Floorplan(
            width=_number(fp_obj, "floorplan", "width_m", required=True),
            height=_number(fp_obj, "floorplan", "height_m", required=True),
        ),
    )

    if "channel" not in doc:
        _fail("channel", "missing required section")
    ch_obj = doc["channel"]
    if not isinstance(ch_obj, dict):
        _fail("channel", "expected an object")
    _check_keys(
        ch_obj,
        "channel",
        ("beta", "sigma_dbm", "p0_dbm", "d0_m", "d_min_m", "sensitivity_dbm"),
    )
    if "sensitivity_dbm" in ch_obj and ch_obj["sensitivity_dbm"] is None:
        sensitivity = None
    else:
        sensitivity = _number(ch_obj, "channel", "sensitivity_dbm", default=-100.0)
    channel = _wrap(
        "channel",
        lambda: ChannelModel(
            beta=_number(ch_obj, "channel", "beta", required=True),
            sigma=_number(ch_obj, "channel", "sigma_dbm", required=True),
            p0=_number(ch_obj, "channel", "p0_dbm", required=True),
            d0=_number(ch_obj, "channel", "d0_m", default=1.0),
            d_min=_number(ch_obj, "channel", "d_min_m", default=0.5),
            sensitivity=sensitivity,
        ),
    )

    pdr_obj = doc.get("pdr", {})
    if not isinstance(pdr_obj, dict):
        _fail("pdr", "expected an object")
    _check_keys(
        pdr_obj,
        "pdr",
        ("step_length_m", "dmax_rad_per_s", "sigma_sn_m", "step_period_s", "sigma_sn_scaling"),
    )
    pdr = _wrap(
        "pdr",
        lambda: PdrParams(
            step_length=_number(pdr_obj, "pdr", "step_length_m", default=DEFAULT_PDR.step_length),
            dmax=_number(pdr_obj, "pdr", "dmax_rad_per_s", default=DEFAULT_PDR.dmax),
            sigma_sn=_number(pdr_obj, "pdr", "sigma_sn_m", default=DEFAULT_PDR.sigma_sn),
            step_period=_number(pdr_obj, "pdr", "step_period_s", default=DEFAULT_PDR.step_period),
            sigma_sn_scaling=_string(
                pdr_obj, "pdr", "sigma_sn_scaling",
                default=DEFAULT_PDR.sigma_sn_scaling, choices=SN_SCALINGS,
            ),
        ),
    )

    grid_obj = doc.get("grid", {})
    if not isinstance(grid_obj, dict):
        _fail("grid", "expected an object")
    _check_keys(grid_obj, "grid", ("resolution_m",))
    grid_resolution = _number(grid_obj, "grid", "resolution_m", default=DEFAULT_GRID_RESOLUTION)
    if not grid_resolution > 0:
        _fail("grid.resolution_m", f"must be positive, got {grid_resolution}")

    layout = parse_beacons(doc.get("beacons", []), floorplan)

    optimize = parse_optimize_section(
        doc.get("optimize", {}),
        base=SaConfig(beacon_count=max(len(layout.beacons), 1)),
    )

    return Project(
        id=pid,
        name=name,
        created_utc=created,
        modified_utc=modified,
        version=version,
        floorplan=floorplan,
        channel=channel,
        pdr=pdr,
        grid_resolution=grid_resolution,
        layout=layout,
        optimize=optimize,
    )


def parse_beacons(beacons_obj, floorplan: Floorplan) -> BeaconLayout:
    """Validate a beacon list against a floorplan; diagnostics name beacons[i]."""
    if not isinstance(beacons_obj, list):
        _fail("beacons", "expected a list")
    beacons = []
    for i, b in enumerate(beacons_obj):
        if not isinstance(b, dict):
            _fail(f"beacons[{i}]", "expected an object")
        _check_keys(b, f"beacons[{i}]", ("id", "x_m", "y_m"))
        beacons.append(
            _wrap(
                f"beacons[{i}]",
                lambda b=b, i=i: Beacon(
                    id=_string(b, f"beacons[{i}]", "id", required=True),
                    position=Point2(
                        _number(b, f"beacons[{i}]", "x_m", required=True),
                        _number(b, f"beacons[{i}]", "y_m", required=True),
                    ),
                ),
            )
        )
    return _wrap("beacons", lambda: BeaconLayout(floorplan=floorplan, beacons=beacons))


def parse_optimize_section(opt_obj: dict, base: SaConfig) -> SaConfig:
    """Validate an optimizer section, overlaying ``base`` for omitted keys.

    Shared between project loading (base = spec defaults) and the optimize
    endpoint (base = the project's stored config, body keys override).
    """
    if not isinstance(opt_obj, dict):
        _fail("optimize", "expected an object")
    _check_keys(
        opt_obj,
        "optimize",
        (
            "beacon_count",
            "objective",
            "unbounded_penalty_m",
            "initial_temp_m",
            "cooling_factor",
            "iters_per_temp",
            "min_temp_ratio",
            "move_sigma_m",
            "max_evals",
            "seed",
        ),
    )
    if "initial_temp_m" not in opt_obj:
        initial_temp = base.initial_temp
    elif opt_obj["initial_temp_m"] == "auto":
        initial_temp = None
    else:
        initial_temp = _number(opt_obj, "optimize", "initial_temp_m")
    return _wrap(
        "optimize",
        lambda: SaConfig(
            beacon_count=_integer(opt_obj, "optimize", "beacon_count", default=base.beacon_count),
            objective=_string(
                opt_obj, "optimize", "objective", default=base.objective, choices=OBJECTIVES
            ),
            unbounded_penalty=_number(
                opt_obj, "optimize", "unbounded_penalty_m", default=base.unbounded_penalty
            ),
            initial_temp=initial_temp,
            cooling_factor=_number(
                opt_obj, "optimize", "cooling_factor", default=base.cooling_factor
            ),
            iters_per_temp=_integer(
                opt_obj, "optimize", "iters_per_temp", default=base.iters_per_temp
            ),
            min_temp_ratio=_number(
                opt_obj, "optimize", "min_temp_ratio", default=base.min_temp_ratio
            ),
            move_sigma=_number(opt_obj, "optimize", "move_sigma_m", default=base.move_sigma),
            max_evals=_integer(opt_obj, "optimize", "max_evals", default=base.max_evals),
            seed=_integer(opt_obj, "optimize", "seed", default=base.seed),
        ),
    )


def load_project(text: str, assign_id: bool = False) -> Project:
    """Parse and validate a project document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProjectValidationError(
            f"parse error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    return parse_project(doc, assign_id=assign_id)


# --- Project -> document ------------------------------------------------------


def to_document(p: Project) -> dict:
    """Canonically ordered plain-dict form of a project."""
    return {
        "format_version": FORMAT_VERSION,
        "id": p.id,
        "name": p.name,
        "created_utc": p.created_utc,
        "modified_utc": p.modified_utc,
        "version": p.version,
        "floorplan": {"width_m": p.floorplan.width, "height_m": p.floorplan.height},
        "channel": {
            "beta": p.channel.beta,
            "sigma_dbm": p.channel.sigma,
            "p0_dbm": p.channel.p0,
            "d0_m": p.channel.d0,
            "d_min_m": p.channel.d_min,
            "sensitivity_dbm": p.channel.sensitivity,
        },
        "pdr": {
            "step_length_m": p.pdr.step_length,
            "dmax_rad_per_s": p.pdr.dmax,
            "sigma_sn_m": p.pdr.sigma_sn,
            "step_period_s": p.pdr.step_period,
            "sigma_sn_scaling": p.pdr.sigma_sn_scaling,
        },
        "grid": {"resolution_m": p.grid_resolution},
        "beacons": [
            {"id": b.id, "x_m": b.position.x, "y_m": b.position.y} for b in p.layout.beacons
        ],
        "optimize": {
            "beacon_count": p.optimize.beacon_count,
            "objective": p.optimize.objective,
            "unbounded_penalty_m": p.optimize.unbounded_penalty,
            "initial_temp_m": "auto" if p.optimize.initial_temp is None else p.optimize.initial_temp,
            "cooling_factor": p.optimize.cooling_factor,
            "iters_per_temp": p.optimize.iters_per_temp,
            "min_temp_ratio": p.optimize.min_temp_ratio,
            "move_sigma_m": p.optimize.move_sigma,
            "max_evals": p.optimize.max_evals,
            "seed": p.optimize.seed,
        },
    }


def canonical_json(value) -> str:
    """Deterministic JSON text: insertion key order, fmt9 floats, 2-space indent."""
    out = []
    _emit(value, out, 0)
    out.append("\n")
    return "".join(out)


def _emit(value, out: list, depth: int):
    pad = "  " * depth
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(value.items()):
            out.append(f"{pad}  {json.dumps(k)}: ")
            _emit(v, out, depth + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, list):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, out, depth + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite number {value} to JSON")
        out.append(fmt9(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} to project JSON")


def export_project(p: Project) -> str:
    return canonical_json(to_document(p))


def save_project(p: Project, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(export_project(p))


def load_project_file(path: str, assign_id: bool = True) -> Project:
    """Load a project document from disk.

    User-authored config files may omit id/timestamps/version (minted on
    load); pass assign_id=False for store-managed documents where identity
    is required.
    """
    with open(path, "r", encoding="utf-8") as fp:
        return load_project(fp.read(), assign_id=assign_id)


def touch(p: Project, bump_version: bool = True) -> Project:
    """Copy with updated modified timestamp and (by default) bumped version."""
    return replace(
        p,
        modified_utc=int(time.time()),
        version=p.version + 1 if bump_version else p.version,
    )
