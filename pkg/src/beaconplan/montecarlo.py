"""Monte-Carlo validation harness for the analytic error models.

Simulates noisy RSS observations and noisy dead-reckoning walks, fuses
them through the production fusion path, and compares empirical errors
against the closed-form models. RSS position estimates are drawn at the
CRLB (efficient-estimator assumption): the harness validates the variance
algebra of the models, not the efficiency of any concrete estimator, and
says so in its report header.

All randomness flows from one seed; each trial owns a generator derived
from (seed, namespace, trial index), so serial and parallel execution
produce identical aggregates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from . import fields
from .fusion import fused_rmse
from .geometry import BeaconLayout, NoInformationError, Point2, Trajectory, fmt9
from .pdr import PdrParams, error_table
from .rss import DET_EPS, LN10, ChannelModel, Fim2, audible_geometry

MODE_WALK = "walk"
MODE_GAUSSIAN = "gaussian"
MODES = (MODE_WALK, MODE_GAUSSIAN)

EFFICIENCY_NOTE = (
    "RSS estimates drawn at the CRLB (efficient-estimator assumption); "
    "this validates the variance algebra, not estimator efficiency"
)


@dataclass(frozen=True)
class SimConfig:
    """Trial count, base seed, trajectory, and per-step length noise."""

    trials: int
    seed: int
    trajectory: Trajectory
    step_sigma: float  # m, std of per-step length noise

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.step_sigma < 0:
            raise ValueError(f"step_sigma must be >= 0, got {self.step_sigma}")


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one (namespace, trial) slot of a run."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def sample_rss(
    ch: ChannelModel, user: Point2, layout: BeaconLayout, rng: np.random.Generator
) -> np.ndarray:
    """One noisy dBm reading per audible beacon, in layout order."""
    geo = audible_geometry(ch, user, layout)
    if len(geo["dist"]) == 0:
        raise NoInformationError(f"no beacon audible at ({user.x}, {user.y})")
    return geo["mean_dbm"] + rng.normal(0.0, ch.sigma, len(geo["dist"]))


def empirical_fim(
    ch: ChannelModel,
    user: Point2,
    layout: BeaconLayout,
    n_samples: int,
    rng: np.random.Generator,
) -> Fim2:
    """Information matrix as the second moment of the score over noise draws.

    Batched evaluation of the same score as ``rss.log_likelihood_score``:
    sampled residuals scale fixed per-beacon gradient directions, and the
    outer products are averaged over the batch.
    """
    if n_samples < 1000:
        raise ValueError(f"need >= 1000 samples for a stable estimate, got {n_samples}")
    geo = audible_geometry(ch, user, layout)
    m = len(geo["dist"])
    if m == 0:
        raise NoInformationError(f"no beacon audible at ({user.x}, {user.y})")
    g = 10.0 * ch.beta / LN10
    coef_x = g * geo["ux"] / geo["dist"] / (ch.sigma * ch.sigma)
    coef_y = g * geo["uy"] / geo["dist"] / (ch.sigma * ch.sigma)
    jxx = jxy = jyy = 0.0
    remaining = n_samples
    while remaining > 0:
        batch = min(remaining, 200_000)
        eps = rng.normal(0.0, ch.sigma, (batch, m))
        gx = eps @ coef_x
        gy = eps @ coef_y
        jxx += float(gx @ gx)
        jxy += float(gx @ gy)
        jyy += float(gy @ gy)
        remaining -= batch
    return Fim2.symmetric(jxx=jxx / n_samples, jxy=jxy / n_samples, jyy=jyy / n_samples)


@dataclass(frozen=True)
class WalkResult:
    """Per-trial true tracks and the (shared, noise-free) dead-reckoned track."""

    true_tracks: np.ndarray  # (trials, steps, 2)
    pdr_track: np.ndarray  # (steps, 2), nominal heading and step length
    drift_rates: np.ndarray  # (trials,), rad/s drawn uniform in [-dmax, dmax]


def simulate_walk(
    traj: Trajectory, pdr_params: PdrParams, sim: SimConfig, seed_namespace: int = 0
) -> WalkResult:
    """Integrate noisy walks: constant per-trial drift rate, iid step noise.

    Each trial draws a heading drift rate uniformly in [-dmax, dmax]
    (held for the whole walk) and per-step lengths S + N(0, step_sigma^2),
    then integrates the drifted track. The dead-reckoned estimate ignores
    both noise sources, so it equals the nominal trajectory.
    """
    n = traj.step_count
    k = np.arange(n, dtype=np.float64)
    nominal = np.empty((n, 2))
    nominal[:, 0] = traj.start.x + (k + 1) * pdr_params.step_length * math.cos(traj.heading)
    nominal[:, 1] = traj.start.y + (k + 1) * pdr_params.step_length * math.sin(traj.heading)

    tracks = np.empty((sim.trials, n, 2))
    drifts = np.empty(sim.trials)
    for t in range(sim.trials):
        rng = derived_rng(sim.seed, seed_namespace, t)
        rate = rng.uniform(-pdr_params.dmax, pdr_params.dmax)
        lengths = pdr_params.step_length + rng.normal(0.0, sim.step_sigma, n)
        headings = traj.heading + rate * k * pdr_params.step_period
        tracks[t, :, 0] = traj.start.x + np.cumsum(lengths * np.cos(headings))
        tracks[t, :, 1] = traj.start.y + np.cumsum(lengths * np.sin(headings))
        drifts[t] = rate
    return WalkResult(true_tracks=tracks, pdr_track=nominal, drift_rates=drifts)


@dataclass(frozen=True)
class ReportRow:
    step: int
    model_rss: float
    model_pdr: float
    model_fused: float
    emp_rss: float
    emp_pdr: float
    emp_fused: float


@dataclass(frozen=True)
class FusionReport:
    rows: tuple
    mode: str
    seed: int
    trials: int
    note: str
    config_echo: dict


def _crlb_at(ch: ChannelModel, layout: BeaconLayout, xs: np.ndarray, ys: np.ndarray) -> tuple:
    bx, by = layout.positions()
    return fields.crlb_field(
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(ys, dtype=np.float64),
        bx,
        by,
        ch.info_coeff(),
        ch.d_min,
        ch.audible_range(),
        DET_EPS,
    )


def validate_fusion(
    ch: ChannelModel,
    layout: BeaconLayout,
    traj: Trajectory,
    pdr_params: PdrParams,
    sim: SimConfig,
    mode: str = MODE_WALK,
) -> FusionReport:
    """Empirical vs model RMSE per step for RSS, PDR, and their fusion.

    walk mode: truth is the drifted walk; the PDR estimate is the nominal
    dead-reckoned track and the RSS estimate is drawn around the per-trial
    truth at its CRLB. gaussian mode: both estimates are drawn around the
    nominal trajectory at exactly their model variances, which isolates
    the fusion variance algebra from the drift model.

    Fusion weights always come from the model variances (sigma_s/sigma_g
    on the x/y axes verbatim), mirroring what a live system would know.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    n = traj.step_count
    s_tab, g_tab = error_table(pdr_params, n)
    pdr_var = np.stack([s_tab * s_tab, g_tab * g_tab], axis=1)  # (n, 2)

    if mode == MODE_WALK:
        walk = simulate_walk(traj, pdr_params, sim, seed_namespace=0)
        nominal = walk.pdr_track
    else:
        walk = None
        k = np.arange(1, n + 1, dtype=np.float64)
        nominal = np.stack(
            [
                traj.start.x + k * pdr_params.step_length * math.cos(traj.heading),
                traj.start.y + k * pdr_params.step_length * math.sin(traj.heading),
            ],
            axis=1,
        )

    # Model curves at the nominal trajectory.
    mvx, mvy, _ = _crlb_at(ch, layout, nominal[:, 0], nominal[:, 1])
    model_rss = np.sqrt(mvx + mvy)
    model_pdr = np.hypot(s_tab, g_tab)
    model_fused = np.array(
        [fused_rmse(mvx[i], mvy[i], s_tab[i], g_tab[i]) for i in range(n)]
    )

    sq_rss = np.zeros(n)
    sq_pdr = np.zeros(n)
    sq_fused = np.zeros(n)
    rss_counts = np.zeros(n)

    for t in range(sim.trials):
        rng = derived_rng(sim.seed, 1, t)
        if mode == MODE_WALK:
            truth = walk.true_tracks[t]
            pdr_est = nominal
            vx, vy, _ = _crlb_at(ch, layout, truth[:, 0], truth[:, 1])
        else:
            truth = nominal
            pdr_noise = rng.normal(0.0, 1.0, (n, 2)) * np.sqrt(pdr_var)
            pdr_est = truth + pdr_noise
            vx, vy = mvx, mvy

        bounded = np.isfinite(vx) & np.isfinite(vy)
        noise = rng.normal(0.0, 1.0, (n, 2))
        rss_est = truth.copy()
        rss_est[bounded, 0] += noise[bounded, 0] * np.sqrt(vx[bounded])
        rss_est[bounded, 1] += noise[bounded, 1] * np.sqrt(vy[bounded])

        # Inverse-variance fusion per axis with model weights; where the
        # RSS bound is unbounded the PDR estimate passes through.
        wx = np.where(bounded, _weighted(rss_est[:, 0], vx, pdr_est[:, 0], pdr_var[:, 0]), pdr_est[:, 0])
        wy = np.where(bounded, _weighted(rss_est[:, 1], vy, pdr_est[:, 1], pdr_var[:, 1]), pdr_est[:, 1])

        sq_pdr += np.sum((pdr_est - truth) ** 2, axis=1)
        sq_fused += (wx - truth[:, 0]) ** 2 + (wy - truth[:, 1]) ** 2
        sq_rss[bounded] += np.sum((rss_est - truth) ** 2, axis=1)[bounded]
        rss_counts += bounded

    emp_pdr = np.sqrt(sq_pdr / sim.trials)
    emp_fused = np.sqrt(sq_fused / sim.trials)
    with np.errstate(invalid="ignore", divide="ignore"):
        emp_rss = np.where(rss_counts > 0, np.sqrt(sq_rss / np.maximum(rss_counts, 1)), np.inf)

    rows = tuple(
        ReportRow(
            step=i + 1,
            model_rss=float(model_rss[i]),
            model_pdr=float(model_pdr[i]),
            model_fused=float(model_fused[i]),
            emp_rss=float(emp_rss[i]),
            emp_pdr=float(emp_pdr[i]),
            emp_fused=float(emp_fused[i]),
        )
        for i in range(n)
    )
    return FusionReport(
        rows=rows,
        mode=mode,
        seed=sim.seed,
        trials=sim.trials,
        note=EFFICIENCY_NOTE,
        config_echo={
            "trials": sim.trials,
            "seed": sim.seed,
            "mode": mode,
            "step_sigma_m": sim.step_sigma,
            "start": (traj.start.x, traj.start.y),
            "heading_rad": traj.heading,
            "steps": traj.step_count,
            "step_length_m": pdr_params.step_length,
            "dmax_rad_per_s": pdr_params.dmax,
            "sigma_sn_m": pdr_params.sigma_sn,
            "step_period_s": pdr_params.step_period,
            "sigma_sn_scaling": pdr_params.sigma_sn_scaling,
            "channel_beta": ch.beta,
            "channel_sigma_dbm": ch.sigma,
        },
    )


def _weighted(x1: np.ndarray, v1: np.ndarray, x2: np.ndarray, v2: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        return (x1 * v2 + x2 * v1) / (v1 + v2)


def empirical_fused_variance(
    var1: float, var2: float, trials: int, rng: np.random.Generator
) -> float:
    """Monte-Carlo variance of the fused scalar estimate of two Gaussian sources.

    Direct empirical check of the parallel-variance law: draws unbiased
    estimates at the given variances, combines them with explicit
    inverse-variance weights (the weighted-mean construction, not the
    closed-form variance under test), and returns the second moment of the
    fused draws. Converges to var1*var2/(var1+var2).
    """
    e1 = rng.normal(0.0, math.sqrt(var1), trials)
    e2 = rng.normal(0.0, math.sqrt(var2), trials)
    fused = (e1 * var2 + e2 * var1) / (var1 + var2)
    return float(np.mean(fused * fused))


def write_report_csv(fp: IO[str], report: FusionReport) -> None:
    fp.write(f"# note={report.note}\n")
    for key, value in report.config_echo.items():
        fp.write(f"# {key}={value}\n")
    fp.write("step,model_rss,model_pdr,model_fused,emp_rss,emp_pdr,emp_fused\n")
    for r in report.rows:
        fp.write(
            f"{r.step},{fmt9(r.model_rss)},{fmt9(r.model_pdr)},{fmt9(r.model_fused)},"
            f"{fmt9(r.emp_rss)},{fmt9(r.emp_pdr)},{fmt9(r.emp_fused)}\n"
        )
