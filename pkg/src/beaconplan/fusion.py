"""Inverse-variance weighted least-squares fusion of position estimates.

Fusing two unbiased estimates of the same quantity with weights 1/variance
gives the minimum-variance linear combination; the fused variance is the
"parallel" combination v1*v2/(v1+v2), never larger than either input. An
UNBOUNDED variance contributes zero weight, so a dead source degrades
gracefully instead of failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

from .geometry import (
    UNBOUNDED,
    BeaconLayout,
    NoInformationError,
    Point2,
    Trajectory,
    fmt9,
    trajectory_point,
)
from .pdr import PdrParams, error_table
from .rss import ChannelModel, axis_variances

SOURCE_RSS = "rss"
SOURCE_PDR = "pdr"
SOURCE_FUSED = "fused"


@dataclass(frozen=True)
class PositionEstimate:
    """A planar position with per-axis variances (m^2) and its source tag."""

    position: Point2
    var_x: float
    var_y: float
    source: str = SOURCE_FUSED

    def __post_init__(self):
        for name, v in (("var_x", self.var_x), ("var_y", self.var_y)):
            if not (v > 0 or v == UNBOUNDED):
                raise ValueError(f"{name} must be positive or UNBOUNDED, got {v}")


def fused_variance(var_a: float, var_b: float) -> float:
    """Parallel combination var_a*var_b/(var_a+var_b) of two axis variances.

    Evaluated as min*(max/(min+max)): the second factor never exceeds 1 in
    IEEE arithmetic, so the result provably never exceeds min(var_a, var_b)
    even in the last ulp. UNBOUNDED acts as zero weight (the other side
    survives); a zero variance wins outright.
    """
    if math.isinf(var_a):
        return var_b
    if math.isinf(var_b):
        return var_a
    lo, hi = (var_a, var_b) if var_a <= var_b else (var_b, var_a)
    if lo == 0.0:
        return 0.0
    return lo * (hi / (lo + hi))


def _fused_coordinate(x1: float, var1: float, x2: float, var2: float) -> float:
    """Inverse-variance weighted coordinate, clamped into [min, max].

    The clamp guards against last-ulp rounding drifting the weighted mean
    outside the hull of its inputs; it is symmetric in the two arguments.
    """
    if math.isinf(var1) and math.isinf(var2):
        raise NoInformationError("both sources unbounded on an axis; nothing to fuse")
    if math.isinf(var1):
        return x2
    if math.isinf(var2):
        return x1
    lo, hi = (x1, x2) if x1 <= x2 else (x2, x1)
    r = (x1 * var2 + x2 * var1) / (var1 + var2)
    return min(max(r, lo), hi)


def weighted_ls(values: Sequence[float], variances: Sequence[float]) -> tuple:
    """Weighted least-squares estimate of a scalar from n observations.

    Weights are 1/variance; UNBOUNDED variances get zero weight. Returns
    (estimate, variance) where the estimate is the weighted mean and its
    variance is 1/sum(weights). Raises NoInformationError when every
    observation is unbounded.
    """
    if len(values) != len(variances):
        raise ValueError(f"{len(values)} values vs {len(variances)} variances")
    if not values:
        raise ValueError("need at least one observation")
    w_sum = 0.0
    wy_sum = 0.0
    for y, v in zip(values, variances):
        if math.isinf(v):
            continue
        if not v > 0:
            raise ValueError(f"variances must be positive or UNBOUNDED, got {v}")
        w = 1.0 / v
        w_sum += w
        wy_sum += w * y
    if w_sum == 0.0:
        raise NoInformationError("all observation variances are UNBOUNDED")
    return wy_sum / w_sum, 1.0 / w_sum


def fuse_positions(a: PositionEstimate, b: PositionEstimate) -> PositionEstimate:
    """Per-axis inverse-variance fusion of two position estimates.

    Cross-covariance between the sources is taken as zero (independent
    errors). Exactly symmetric in its arguments. Raises NoInformationError
    if both inputs are UNBOUNDED on the same axis.
    """
    x = _fused_coordinate(a.position.x, a.var_x, b.position.x, b.var_x)
    y = _fused_coordinate(a.position.y, a.var_y, b.position.y, b.var_y)
    return PositionEstimate(
        position=Point2(x, y),
        var_x=fused_variance(a.var_x, b.var_x),
        var_y=fused_variance(a.var_y, b.var_y),
        source=SOURCE_FUSED,
    )


def fused_rmse(var_x: float, var_y: float, sigma_s: float, sigma_g: float) -> float:
    """Fused RMSE (m) from RSS axis variances and PDR error magnitudes.

    sqrt(vx*ss^2/(vx+ss^2) + vy*sg^2/(vy+sg^2)) with the along-track term
    mapped to x and the cross-track term to y (world axes, the verbatim
    axis convention). UNBOUNDED inputs fall back to the bounded side; an
    axis with both sides UNBOUNDED makes the result UNBOUNDED.
    """
    vx = fused_variance(var_x, sigma_s * sigma_s)
    vy = fused_variance(var_y, sigma_g * sigma_g)
    if math.isinf(vx) or math.isinf(vy):
        return UNBOUNDED
    return math.sqrt(vx + vy)


@dataclass(frozen=True)
class CurvePoint:
    """One step of the three-model error comparison (all in meters)."""

    step: int
    rss_rmse: float
    pdr_rmse: float
    fused_rmse: float


def fused_curve(
    ch: ChannelModel,
    layout: BeaconLayout,
    traj: Trajectory,
    pdr_params: PdrParams,
    rotate_pdr_frame: bool = False,
) -> list:
    """RSS / PDR / fused RMSE at every step along a trajectory.

    The PDR step count restarts at the trajectory start (step 0 is the last
    localization reset). With ``rotate_pdr_frame`` the PDR covariance
    diagonal is rotated from the walking frame into world axes by the
    trajectory heading before fusing; the default keeps the verbatim
    along-track->x / cross-track->y mapping.
    """
    sigma_s_tab, sigma_g_tab = error_table(pdr_params, traj.step_count)
    cos_h = math.cos(traj.heading)
    sin_h = math.sin(traj.heading)
    rows = []
    for k in range(1, traj.step_count + 1):
        p = trajectory_point(traj, k, pdr_params.step_length)
        if not layout.floorplan.contains(p):
            raise ValueError(
                f"trajectory leaves the floorplan at step {k}: ({p.x:.3f}, {p.y:.3f})"
            )
        av = axis_variances(ch, p, layout)
        rss = (
            math.sqrt(av.var_x + av.var_y)
            if not (math.isinf(av.var_x) or math.isinf(av.var_y))
            else UNBOUNDED
        )
        ss = float(sigma_s_tab[k - 1])
        gg = float(sigma_g_tab[k - 1])
        if rotate_pdr_frame:
            pdr_vx = ss * ss * cos_h * cos_h + gg * gg * sin_h * sin_h
            pdr_vy = ss * ss * sin_h * sin_h + gg * gg * cos_h * cos_h
            fx = fused_variance(av.var_x, pdr_vx)
            fy = fused_variance(av.var_y, pdr_vy)
            fused = UNBOUNDED if math.isinf(fx) or math.isinf(fy) else math.sqrt(fx + fy)
        else:
            fused = fused_rmse(av.var_x, av.var_y, ss, gg)
        rows.append(
            CurvePoint(step=k, rss_rmse=rss, pdr_rmse=math.hypot(ss, gg), fused_rmse=fused)
        )
    return rows


def write_curve_csv(fp: IO[str], rows: Sequence[CurvePoint]) -> None:
    fp.write("step,rss_rmse_m,pdr_rmse_m,fused_rmse_m\n")
    for r in rows:
        fp.write(f"{r.step},{fmt9(r.rss_rmse)},{fmt9(r.pdr_rmse)},{fmt9(r.fused_rmse)}\n")
