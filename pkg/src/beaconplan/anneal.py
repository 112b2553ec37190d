"""Simulated-annealing search over beacon positions.

Single-chain annealer with Gaussian single-beacon moves, geometric
cooling, and best-ever tracking. The objective is the exact map engine
(mean bounded cell error plus a penalty per unbounded cell), so a run is
as faithful as the maps it optimizes; use a coarser grid resolution than
for display. Fully deterministic for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Callable, Optional

import numpy as np

from .errormap import fused_error_map, rss_error_map
from .geometry import Beacon, BeaconLayout, Floorplan, GridSpec, Point2, fmt9
from .pdr import PdrParams
from .rss import ChannelModel

OBJECTIVE_RSS = "mean_rss_error"
OBJECTIVE_FUSED = "mean_fused_error"
OBJECTIVES = (OBJECTIVE_RSS, OBJECTIVE_FUSED)


@dataclass(frozen=True)
class SaConfig:
    """Annealer hyperparameters; every field is recorded in the result."""

    beacon_count: int
    objective: str = OBJECTIVE_RSS
    unbounded_penalty: float = 20.0  # m charged per fully-uncovered cell
    initial_temp: Optional[float] = None  # None = auto (std over 50 random layouts)
    cooling_factor: float = 0.95
    iters_per_temp: int = 50
    min_temp_ratio: float = 1e-3
    move_sigma: float = 2.0  # m, per-axis Gaussian move size
    max_evals: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.beacon_count < 1:
            raise ValueError(f"beacon_count must be >= 1, got {self.beacon_count}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if not 0.0 < self.cooling_factor < 1.0:
            raise ValueError(f"cooling_factor must be in (0, 1), got {self.cooling_factor}")
        if not self.move_sigma > 0:
            raise ValueError(f"move_sigma must be positive, got {self.move_sigma}")
        if self.iters_per_temp < 1:
            raise ValueError(f"iters_per_temp must be >= 1, got {self.iters_per_temp}")
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be >= 1, got {self.max_evals}")
        if self.unbounded_penalty < 0:
            raise ValueError(f"unbounded_penalty must be >= 0, got {self.unbounded_penalty}")


@dataclass(frozen=True)
class HistoryPoint:
    eval_index: int
    current: float
    best: float
    temperature: float


@dataclass(frozen=True)
class SaResult:
    best_layout: BeaconLayout
    best_objective: float
    history: tuple
    evals_used: int
    config: SaConfig


def objective(
    ch: ChannelModel,
    layout: BeaconLayout,
    grid: GridSpec,
    cfg: SaConfig,
    pdr_params: Optional[PdrParams] = None,
) -> float:
    """Mean bounded-cell error plus unbounded_penalty * unbounded fraction.

    A layout with zero bounded cells scores the full penalty (the mean term
    is empty), keeping the objective total over degenerate layouts.
    """
    if cfg.objective == OBJECTIVE_FUSED:
        if pdr_params is None:
            raise ValueError("mean_fused_error objective needs pdr_params")
        emap = fused_error_map(ch, layout, grid, pdr_params)
    else:
        emap = rss_error_map(ch, layout, grid)
    mask = emap.bounded_mask()
    count = int(mask.sum())
    unbounded_fraction = 1.0 - count / grid.cell_count
    mean = float(emap.values[mask].mean()) if count else 0.0
    return mean + cfg.unbounded_penalty * unbounded_fraction


def _random_layout(rng: np.random.Generator, floorplan: Floorplan, count: int) -> BeaconLayout:
    xs = rng.uniform(0.0, floorplan.width, count)
    ys = rng.uniform(0.0, floorplan.height, count)
    beacons = [Beacon(id=f"b{i:02d}", position=Point2(x, y)) for i, (x, y) in enumerate(zip(xs, ys))]
    return BeaconLayout(floorplan=floorplan, beacons=beacons)


def _move(
    rng: np.random.Generator, layout: BeaconLayout, move_sigma: float
) -> BeaconLayout:
    fp = layout.floorplan
    idx = int(rng.integers(len(layout.beacons)))
    b = layout.beacons[idx]
    x = min(max(b.position.x + rng.normal(0.0, move_sigma), 0.0), fp.width)
    y = min(max(b.position.y + rng.normal(0.0, move_sigma), 0.0), fp.height)
    beacons = list(layout.beacons)
    beacons[idx] = Beacon(id=b.id, position=Point2(x, y))
    return BeaconLayout(floorplan=fp, beacons=beacons)


def anneal(
    ch: ChannelModel,
    floorplan: Floorplan,
    grid: GridSpec,
    cfg: SaConfig,
    pdr_params: Optional[PdrParams] = None,
    progress: Optional[Callable[[int, float], None]] = None,
) -> SaResult:
    """Run the annealing chain and return the best layout ever evaluated.

    The chain starts from a uniform random layout, then repeatedly moves a
    single uniformly-chosen beacon by a per-axis Gaussian offset (clamped
    to the floorplan), accepting worsening moves with probability
    exp(-delta/T). T cools geometrically every ``iters_per_temp``
    evaluations and the run stops below ``min_temp_ratio`` of the starting
    temperature or at ``max_evals``. Auto initial temperature is the
    objective's standard deviation over 50 extra random layouts; those
    calibration evaluations are not charged against max_evals. ``progress``
    (if given) is called as progress(evals_used, best_objective) after
    every evaluation.
    """
    if not (floorplan.width > 0 and floorplan.height > 0):
        raise ValueError("floorplan must have positive area")
    rng = np.random.default_rng(cfg.seed)

    current = _random_layout(rng, floorplan, cfg.beacon_count)
    current_obj = objective(ch, current, grid, cfg, pdr_params)
    evals = 1
    best, best_obj = current, current_obj

    if cfg.initial_temp is None:
        samples = [
            objective(ch, _random_layout(rng, floorplan, cfg.beacon_count), grid, cfg, pdr_params)
            for _ in range(50)
        ]
        t0 = float(np.std(samples))
    else:
        t0 = float(cfg.initial_temp)
    temp = t0

    history = [HistoryPoint(0, current_obj, best_obj, temp)]
    if progress is not None:
        progress(evals, best_obj)

    while evals < cfg.max_evals and temp >= cfg.min_temp_ratio * t0:
        candidate = _move(rng, current, cfg.move_sigma)
        cand_obj = objective(ch, candidate, grid, cfg, pdr_params)
        evals += 1
        delta = cand_obj - current_obj
        # temp == 0 happens when auto-calibration sees a flat objective;
        # degrade to greedy acceptance instead of dividing by zero.
        accept = delta <= 0.0 or (temp > 0.0 and rng.random() < math.exp(-delta / temp))
        if accept:
            current, current_obj = candidate, cand_obj
            if cand_obj < best_obj:
                best, best_obj = candidate, cand_obj
        history.append(HistoryPoint(evals - 1, current_obj, best_obj, temp))
        if progress is not None:
            progress(evals, best_obj)
        if (evals - 1) % cfg.iters_per_temp == 0:
            temp *= cfg.cooling_factor

    return SaResult(
        best_layout=best,
        best_objective=best_obj,
        history=tuple(history),
        evals_used=evals,
        config=cfg,
    )


def write_history_csv(fp: IO[str], result: SaResult) -> None:
    fp.write("eval,current,best,temperature\n")
    for h in result.history:
        fp.write(f"{h.eval_index},{fmt9(h.current)},{fmt9(h.best)},{fmt9(h.temperature)}\n")
