"""Rasterize signal strength and localization error over the floorplan.

Every map evaluates cells at their centers, independently, through the
selected field backend (see ``beaconplan.fields``); output ordering is
row-major and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields
from .geometry import (
    UNBOUNDED,
    BeaconLayout,
    ErrorGrid,
    GridSpec,
    NoInformationError,
)
from .pdr import PdrParams, error_table
from .rss import DET_EPS, ChannelModel

MAP_STRENGTH = "strength"
MAP_RSS_ERROR = "rss_error"
MAP_FUSED_ERROR = "fused_error"
MAP_KINDS = (MAP_STRENGTH, MAP_RSS_ERROR, MAP_FUSED_ERROR)

PDR_MODE_UNIFORM = "uniform_horizon"
PDR_MODE_DISTANCE = "distance_to_beacon"
PDR_MODES = (PDR_MODE_UNIFORM, PDR_MODE_DISTANCE)

DEFAULT_HORIZON = 20


@dataclass(frozen=True)
class GridMean:
    """Mean over bounded cells plus the fraction of cells that are bounded."""

    mean: float
    bounded_fraction: float


def strength_map(ch: ChannelModel, layout: BeaconLayout, grid: GridSpec) -> ErrorGrid:
    """Strongest predicted signal per cell (dBm): what a survey app would show.

    Beacons combine by max, not power sum. Raises NoInformationError on an
    empty layout (there is no strongest signal to report).
    """
    if not layout.beacons:
        raise NoInformationError("strength map needs at least one beacon")
    cx, cy = grid.cell_centers()
    bx, by = layout.positions()
    values = fields.strength_field(cx, cy, bx, by, ch.p0, ch.beta, ch.d0, ch.d_min)
    return ErrorGrid(spec=grid, unit="dBm", values=values)


def _variance_fields(ch: ChannelModel, layout: BeaconLayout, grid: GridSpec) -> tuple:
    cx, cy = grid.cell_centers()
    bx, by = layout.positions()
    return fields.crlb_field(
        cx, cy, bx, by, ch.info_coeff(), ch.d_min, ch.audible_range(), DET_EPS
    )


def rss_error_map(ch: ChannelModel, layout: BeaconLayout, grid: GridSpec) -> ErrorGrid:
    """CRLB position RMSE per cell (m); UNBOUNDED where the bound is singular."""
    var_x, var_y, _ = _variance_fields(ch, layout, grid)
    return ErrorGrid(spec=grid, unit="m", values=np.sqrt(var_x + var_y))


def fused_error_map(
    ch: ChannelModel,
    layout: BeaconLayout,
    grid: GridSpec,
    pdr_params: PdrParams,
    mode: str = PDR_MODE_DISTANCE,
    horizon: int = DEFAULT_HORIZON,
) -> ErrorGrid:
    """Fused RSS+PDR RMSE per cell (m).

    The dead-reckoning age n of a cell is either the fixed ``horizon``
    (uniform_horizon) or the step count needed to reach the cell from the
    nearest beacon, ceil(distance / step_length) clamped to [1, horizon]
    (distance_to_beacon; captures that the walker was last well-localized
    near a beacon). Cells with an UNBOUNDED RSS bound degrade to the pure
    PDR error at their n.
    """
    if mode not in PDR_MODES:
        raise ValueError(f"unknown pdr mode {mode!r}, expected one of {PDR_MODES}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    var_x, var_y, nearest = _variance_fields(ch, layout, grid)
    if mode == PDR_MODE_UNIFORM or not layout.beacons:
        n_cell = np.full(var_x.shape, horizon, dtype=np.int64)
    else:
        steps = np.ceil(nearest / pdr_params.step_length).astype(np.int64)
        n_cell = np.clip(steps, 1, horizon)
    s_tab, g_tab = error_table(pdr_params, horizon)
    ss = s_tab[n_cell - 1]
    gg = g_tab[n_cell - 1]
    # Parallel combination per axis; where RSS is unbounded the PDR term
    # survives unchanged, reproducing the pure-PDR fallback.
    vs = ss * ss
    vg = gg * gg
    with np.errstate(invalid="ignore"):
        fx = np.where(np.isinf(var_x), vs, _parallel(var_x, vs))
        fy = np.where(np.isinf(var_y), vg, _parallel(var_y, vg))
    return ErrorGrid(spec=grid, unit="m", values=np.sqrt(fx + fy))


def _parallel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # min*(max/(min+max)) so the result cannot exceed min even in the last
    # ulp; matches fusion.fused_variance elementwise.
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = lo * (hi / (lo + hi))
    return np.where(lo == 0.0, 0.0, out)


def grid_mean(grid: ErrorGrid) -> GridMean:
    """Arithmetic mean over bounded cells and the bounded-cell fraction."""
    mask = grid.bounded_mask()
    count = int(mask.sum())
    if count == 0:
        raise NoInformationError("every cell is UNBOUNDED; no mean to report")
    return GridMean(
        mean=float(grid.values[mask].mean()),
        bounded_fraction=count / grid.spec.cell_count,
    )
