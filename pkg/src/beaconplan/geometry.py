"""Floorplan, beacon, raster-grid, and trajectory primitives.

Conventions used across the package: lower-left origin, x to the right,
y up, headings in radians measured from the +x axis, distances in meters.
All types are immutable value objects; operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

# Sentinel for an infinite variance / "no information here" cell.
UNBOUNDED = math.inf

GRID_UNITS = ("dBm", "m", "m2")


class NoInformationError(ValueError):
    """Raised when an estimate is requested but no source carries information."""


def fmt9(value: float) -> str:
    """Canonical 9-significant-digit float formatting.

    Shared by the grid CSV format and the project document so that
    write -> read -> write round-trips are byte-identical. Infinities
    serialize as ``inf`` / ``-inf``.
    """
    v = float(value)
    if v == 0.0:
        return "0"
    return format(v, ".9g")


@dataclass(frozen=True)
class Point2:
    """A 2D position in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Floorplan:
    """Rectangular floorplan with its origin fixed at the lower-left corner."""

    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"floorplan dimensions must be positive, got {self.width}x{self.height}")

    def contains(self, p: Point2) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height


@dataclass(frozen=True)
class Beacon:
    """A radio signal source pinned at a fixed planar position."""

    id: str
    position: Point2

    def __post_init__(self):
        if not self.id:
            raise ValueError("beacon id must be a non-empty string")


@dataclass(frozen=True)
class BeaconLayout:
    """A floorplan plus an ordered beacon list.

    The list may be empty (a degenerate layout that map operations must
    still handle); ids are unique and every beacon lies inside the plan.
    """

    floorplan: Floorplan
    beacons: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "beacons", tuple(self.beacons))
        seen = set()
        for idx, b in enumerate(self.beacons):
            if b.id in seen:
                raise ValueError(f"beacons[{idx}]: duplicate beacon id {b.id!r}")
            seen.add(b.id)
            if not self.floorplan.contains(b.position):
                raise ValueError(
                    f"beacons[{idx}]: position ({b.position.x}, {b.position.y}) "
                    f"outside floorplan {self.floorplan.width}x{self.floorplan.height}"
                )

    def positions(self) -> tuple:
        """Beacon coordinates as (x_array, y_array) float64 vectors."""
        xs = np.array([b.position.x for b in self.beacons], dtype=np.float64)
        ys = np.array([b.position.y for b in self.beacons], dtype=np.float64)
        return xs, ys


@dataclass(frozen=True)
class GridSpec:
    """A regular raster over a floorplan.

    nx = ceil(width / resolution), ny = ceil(height / resolution); cell
    (i, j) is centered at ((i + 0.5) * resolution, (j + 0.5) * resolution).
    Centers of the outermost cells may fall past the floorplan edge when
    the resolution does not divide the extent; that is allowed.
    """

    resolution: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError(f"grid resolution must be positive, got {self.resolution}")
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must have at least one cell, got {self.nx}x{self.ny}")

    @classmethod
    def for_floorplan(cls, floorplan: Floorplan, resolution: float) -> "GridSpec":
        if not resolution > 0:
            raise ValueError(f"grid resolution must be positive, got {resolution}")
        return cls(
            resolution=resolution,
            nx=math.ceil(floorplan.width / resolution),
            ny=math.ceil(floorplan.height / resolution),
        )

    @property
    def cell_count(self) -> int:
        return self.nx * self.ny

    def cell_centers(self) -> tuple:
        """All cell centers, row-major (row j=0 first), as (x, y) float64 vectors."""
        cx = (np.arange(self.nx, dtype=np.float64) + 0.5) * self.resolution
        cy = (np.arange(self.ny, dtype=np.float64) + 0.5) * self.resolution
        xx, yy = np.meshgrid(cx, cy)
        return xx.ravel(), yy.ravel()


def cell_center(spec: GridSpec, i: int, j: int) -> Point2:
    """Center of cell (i, j); raises IndexError outside the raster."""
    if not (0 <= i < spec.nx and 0 <= j < spec.ny):
        raise IndexError(f"cell ({i}, {j}) outside grid {spec.nx}x{spec.ny}")
    return Point2((i + 0.5) * spec.resolution, (j + 0.5) * spec.resolution)


@dataclass(frozen=True, eq=False)
class ErrorGrid:
    """A scalar raster over the floorplan (signal strength or error values).

    ``values`` is row-major with length nx * ny; cells may hold UNBOUNDED
    (infinite variance, e.g. a singular information matrix) but never NaN.
    """

    spec: GridSpec
    unit: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.unit not in GRID_UNITS:
            raise ValueError(f"unknown grid unit {self.unit!r}, expected one of {GRID_UNITS}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.spec.cell_count,):
            raise ValueError(
                f"grid needs {self.spec.cell_count} values ({self.spec.nx}x{self.spec.ny}), got {vals.shape}"
            )
        if np.isnan(vals).any():
            raise ValueError("grid values must be finite or UNBOUNDED, found NaN")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def value_at(self, i: int, j: int) -> float:
        if not (0 <= i < self.spec.nx and 0 <= j < self.spec.ny):
            raise IndexError(f"cell ({i}, {j}) outside grid {self.spec.nx}x{self.spec.ny}")
        return float(self.values[j * self.spec.nx + i])

    def bounded_mask(self) -> np.ndarray:
        return np.isfinite(self.values)


@dataclass(frozen=True)
class Trajectory:
    """A straight constant-heading walk: start point, world-frame heading, step count."""

    start: Point2
    heading: float
    step_count: int

    def __post_init__(self):
        if self.step_count < 1:
            raise ValueError(f"step_count must be >= 1, got {self.step_count}")
        if not -math.pi <= self.heading <= math.pi:
            raise ValueError(f"heading must lie in [-pi, pi], got {self.heading}")


def trajectory_point(traj: Trajectory, k: int, step_length: float) -> Point2:
    """Nominal (drift-free) position after k steps of the given length."""
    if not 1 <= k <= traj.step_count:
        raise IndexError(f"step {k} outside 1..{traj.step_count}")
    if not step_length > 0:
        raise ValueError(f"step_length must be positive, got {step_length}")
    return Point2(
        traj.start.x + k * step_length * math.cos(traj.heading),
        traj.start.y + k * step_length * math.sin(traj.heading),
    )


# --- grid CSV format -------------------------------------------------------
#
#   # unit=<dBm|m|m2>
#   # resolution_m=<res>
#   # nx=<nx>
#   # ny=<ny>
#   <nx comma-separated values>   (ny lines, row j=0 first, inf for UNBOUNDED)


def write_grid_csv(fp: IO[str], grid: ErrorGrid) -> None:
    spec = grid.spec
    fp.write(f"# unit={grid.unit}\n")
    fp.write(f"# resolution_m={fmt9(spec.resolution)}\n")
    fp.write(f"# nx={spec.nx}\n")
    fp.write(f"# ny={spec.ny}\n")
    for j in range(spec.ny):
        row = grid.values[j * spec.nx : (j + 1) * spec.nx]
        fp.write(",".join(fmt9(v) for v in row))
        fp.write("\n")


def read_grid_csv(fp: IO[str]) -> ErrorGrid:
    header = {}
    for key in ("unit", "resolution_m", "nx", "ny"):
        line = fp.readline().strip()
        if not line.startswith("#") or "=" not in line:
            raise ValueError(f"malformed grid CSV header line: {line!r}")
        name, _, value = line.lstrip("# ").partition("=")
        if name != key:
            raise ValueError(f"expected header {key!r}, got {name!r}")
        header[name] = value
    spec = GridSpec(
        resolution=float(header["resolution_m"]),
        nx=int(header["nx"]),
        ny=int(header["ny"]),
    )
    values = np.empty(spec.cell_count, dtype=np.float64)
    for j in range(spec.ny):
        cells = fp.readline().strip().split(",")
        if len(cells) != spec.nx:
            raise ValueError(f"row {j}: expected {spec.nx} values, got {len(cells)}")
        values[j * spec.nx : (j + 1) * spec.nx] = [float(c) for c in cells]
    return ErrorGrid(spec=spec, unit=header["unit"], values=values)
