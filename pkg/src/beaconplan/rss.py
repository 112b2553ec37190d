"""Log-distance path loss and the Cramér-Rao bound for RSS localization.

The channel follows the classic log-distance model: the mean received
power at distance d is P(d0) - 10*beta*log10(d/d0) with additive Gaussian
noise of standard deviation sigma (dBm). For a set of audible beacons the
Fisher information about a planar position accumulates per beacon as

    J_xx += c * cos(a)^2 / d^2      c = (10*beta / (sigma*ln 10))^2
    J_yy += c * sin(a)^2 / d^2
    J_xy += c * sin(a)*cos(a) / d^2

where a is the bearing from the user to the beacon and d the (near-field
clamped) distance. The inverse of J bounds the covariance of any unbiased
position estimator; the square root of its trace is the RMSE floor that
the planner maps over the floorplan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import UNBOUNDED, BeaconLayout, NoInformationError, Point2

LN10 = math.log(10.0)

# Information determinants at or below this are treated as singular.
DET_EPS = 1e-12


@dataclass(frozen=True)
class ChannelModel:
    """Log-distance path-loss parameters.

    Parameters
    ----------
    beta : float
        Path-loss exponent (dimensionless).
    sigma : float
        Standard deviation of the RSS measurement noise, dBm.
    p0 : float
        Mean received power at the reference distance, dBm.
    d0 : float
        Reference distance, meters.
    d_min : float
        Near-field clamp: distances below this are treated as d_min so the
        1/d^2 information terms stay finite directly under a beacon.
    sensitivity : float or None
        Receiver floor, dBm. Beacons whose predicted mean power falls below
        it do not enter the information sum; None disables the filter
        (every beacon is audible everywhere).
    """

    beta: float
    sigma: float
    p0: float
    d0: float = 1.0
    d_min: float = 0.5
    sensitivity: float | None = -100.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.d0 > 0:
            raise ValueError(f"d0 must be positive, got {self.d0}")
        if not self.d_min > 0:
            raise ValueError(f"d_min must be positive, got {self.d_min}")
        if self.sensitivity is not None and not self.sensitivity < self.p0:
            raise ValueError(
                f"sensitivity ({self.sensitivity} dBm) must be below p0 ({self.p0} dBm)"
            )

    def info_coeff(self) -> float:
        """The per-beacon information scale c = (10*beta / (sigma*ln 10))^2."""
        g = 10.0 * self.beta / (self.sigma * LN10)
        return g * g

    def audible_range(self) -> float:
        """Clamped distance at which the predicted mean reaches the sensitivity floor.

        Comparing the clamped distance against this range is algebraically
        the same audibility test as ``predict_rss(...) >= sensitivity``;
        point operations and the grid kernels share it so borderline cells
        agree between code paths.
        """
        if self.sensitivity is None:
            return math.inf
        return self.d0 * 10.0 ** ((self.p0 - self.sensitivity) / (10.0 * self.beta))


@dataclass(frozen=True)
class Fim2:
    """2x2 Fisher information matrix about a planar position (1/m^2 entries)."""

    jxx: float
    jxy: float
    jyx: float
    jyy: float

    def __post_init__(self):
        if self.jxy != self.jyx:
            raise ValueError("information matrix must be symmetric")
        if self.jxx < 0 or self.jyy < 0:
            raise ValueError("diagonal information entries must be nonnegative")

    @classmethod
    def symmetric(cls, jxx: float, jxy: float, jyy: float) -> "Fim2":
        return cls(jxx=jxx, jxy=jxy, jyx=jxy, jyy=jyy)

    def det(self) -> float:
        return self.jxx * self.jyy - self.jxy * self.jyx


@dataclass(frozen=True)
class AxisVariances:
    """Per-axis position variance bounds, m^2; UNBOUNDED when singular."""

    var_x: float
    var_y: float

    def __post_init__(self):
        for name, v in (("var_x", self.var_x), ("var_y", self.var_y)):
            if not (v > 0 or v == UNBOUNDED):
                raise ValueError(f"{name} must be positive or UNBOUNDED, got {v}")


def predict_rss(ch: ChannelModel, d: float) -> float:
    """Mean received power (dBm) at distance d, near-field clamped at d_min."""
    dc = max(d, ch.d_min)
    return ch.p0 - 10.0 * ch.beta * math.log10(dc / ch.d0)


def audible_geometry(ch: ChannelModel, user: Point2, layout: BeaconLayout) -> dict:
    """Per-beacon geometry of the audible subset, in layout order.

    Returns arrays keyed ``ux, uy`` (unit bearing user->beacon; (1, 0) at
    zero distance by convention), ``dist`` (clamped distance), ``mean_dbm``
    (predicted power), and ``index`` (positions in the layout list).
    """
    bx, by = layout.positions()
    dx = bx - user.x
    dy = by - user.y
    d = np.hypot(dx, dy)
    dc = np.maximum(d, ch.d_min)
    keep = dc <= ch.audible_range()
    dx, dy, d, dc = dx[keep], dy[keep], d[keep], dc[keep]
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(d > 0, dx / d, 1.0)
        uy = np.where(d > 0, dy / d, 0.0)
    mean = ch.p0 - 10.0 * ch.beta * np.log10(dc / ch.d0)
    return {
        "ux": ux,
        "uy": uy,
        "dist": dc,
        "mean_dbm": mean,
        "index": np.nonzero(keep)[0],
    }


def fim(ch: ChannelModel, user: Point2, layout: BeaconLayout) -> Fim2:
    """Fisher information at ``user`` contributed by the audible beacons.

    Raises NoInformationError when no beacon is audible.
    """
    c = ch.info_coeff()
    rng = ch.audible_range()
    sxx = sxy = syy = 0.0
    heard = 0
    for b in layout.beacons:
        dx = b.position.x - user.x
        dy = b.position.y - user.y
        d = math.hypot(dx, dy)
        dc = max(d, ch.d_min)
        if dc > rng:
            continue
        heard += 1
        if d > 0.0:
            ux, uy = dx / d, dy / d
        else:
            ux, uy = 1.0, 0.0
        w = 1.0 / (dc * dc)
        sxx += ux * ux * w
        sxy += ux * uy * w
        syy += uy * uy * w
    if heard == 0:
        raise NoInformationError(
            f"no beacon audible at ({user.x}, {user.y}); cannot form an information matrix"
        )
    return Fim2.symmetric(jxx=c * sxx, jxy=c * sxy, jyy=c * syy)


def crlb(f: Fim2) -> tuple:
    """Invert the information matrix: ((var_x, var_y), trace), all in m^2.

    A determinant at or below DET_EPS means the position is unobservable
    along some direction; the bound is then UNBOUNDED rather than an error
    so that grids stay total.
    """
    det = f.det()
    if det <= DET_EPS:
        return AxisVariances(UNBOUNDED, UNBOUNDED), UNBOUNDED
    var_x = f.jyy / det
    var_y = f.jxx / det
    return AxisVariances(var_x, var_y), var_x + var_y


def axis_variances(ch: ChannelModel, user: Point2, layout: BeaconLayout) -> AxisVariances:
    """Per-axis CRLB at a point; (UNBOUNDED, UNBOUNDED) when unheard or singular."""
    try:
        f = fim(ch, user, layout)
    except NoInformationError:
        return AxisVariances(UNBOUNDED, UNBOUNDED)
    return crlb(f)[0]


def rss_rmse(ch: ChannelModel, user: Point2, layout: BeaconLayout) -> float:
    """RMSE lower bound sqrt(var_x + var_y) in meters; UNBOUNDED propagates."""
    try:
        f = fim(ch, user, layout)
    except NoInformationError:
        return UNBOUNDED
    _, trace = crlb(f)
    return math.sqrt(trace) if trace != UNBOUNDED else UNBOUNDED


def log_likelihood_score(
    ch: ChannelModel, user: Point2, layout: BeaconLayout, observed: Sequence[float]
) -> tuple:
    """Gradient of the summed Gaussian log-density w.r.t. (x, y).

    ``observed`` holds one dBm reading per audible beacon, in layout order.
    The near-field clamp is treated as frozen when differentiating, which
    keeps the score's second moment equal to the closed-form information
    matrix under the clamp convention.
    """
    geo = audible_geometry(ch, user, layout)
    m = len(geo["dist"])
    if len(observed) != m:
        raise ValueError(f"expected {m} observations (audible beacons), got {len(observed)}")
    obs = np.asarray(observed, dtype=np.float64)
    eps = obs - geo["mean_dbm"]
    g = 10.0 * ch.beta / LN10
    scale = eps / (ch.sigma * ch.sigma) * g / geo["dist"]
    gx = float(np.dot(scale, geo["ux"]))
    gy = float(np.dot(scale, geo["uy"]))
    return gx, gy
