"""Dead-reckoning error accumulation: along-track and cross-track drift.

A pedestrian stepping at a fixed cadence with a gyro heading that drifts
at up to ``dmax`` rad/s accumulates, after n steps,

    sigma_s = sum_k S * (1 - cos(drift_k)) + step-noise term   (along-track)
    sigma_g = sum_k S * sin(drift_k)                           (cross-track)

with drift_k = dmax * (k - 1) * step_period. Both are error envelopes:
the drift rate enters at its maximum, not as a random draw (the random
counterpart lives in the montecarlo module). The step-noise term is added
once by default; ``sqrt_n`` scaling accumulates it as sigma_sn * sqrt(n)
for the iid Gaussian reading of the step-length model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SN_SCALINGS = ("verbatim", "sqrt_n")


@dataclass(frozen=True)
class PdrParams:
    """Step-length, cadence, and drift parameters of the walker."""

    step_length: float  # m per step
    dmax: float  # rad/s, max heading drift rate
    sigma_sn: float  # m, step-length noise term
    step_period: float = 0.5  # s per step
    sigma_sn_scaling: str = "verbatim"

    def __post_init__(self):
        if not self.step_length > 0:
            raise ValueError(f"step_length must be positive, got {self.step_length}")
        if self.dmax < 0:
            raise ValueError(f"dmax must be nonnegative, got {self.dmax}")
        if self.sigma_sn < 0:
            raise ValueError(f"sigma_sn must be nonnegative, got {self.sigma_sn}")
        if not self.step_period > 0:
            raise ValueError(f"step_period must be positive, got {self.step_period}")
        if self.sigma_sn_scaling not in SN_SCALINGS:
            raise ValueError(
                f"sigma_sn_scaling must be one of {SN_SCALINGS}, got {self.sigma_sn_scaling!r}"
            )


@dataclass(frozen=True)
class PdrErrorEstimate:
    """Along-track / cross-track error magnitudes and their RMS combination."""

    sigma_s: float
    sigma_g: float
    rmse: float


def heading_drift(p: PdrParams, k: int) -> float:
    """Accumulated heading drift (rad) at step k; zero at the first step."""
    if k < 1:
        raise ValueError(f"step index must be >= 1, got {k}")
    return p.dmax * (k - 1) * p.step_period


def _sn_term(p: PdrParams, n: int) -> float:
    if p.sigma_sn_scaling == "sqrt_n":
        return p.sigma_sn * math.sqrt(n)
    return p.sigma_sn


def sigma_s(p: PdrParams, n: int) -> float:
    """Along-track error magnitude (m) after n steps."""
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n}")
    total = 0.0
    for k in range(1, n + 1):
        total += p.step_length * (1.0 - math.cos(heading_drift(p, k)))
    return total + _sn_term(p, n)


def sigma_g(p: PdrParams, n: int) -> float:
    """Cross-track error magnitude (m) after n steps."""
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n}")
    total = 0.0
    for k in range(1, n + 1):
        total += p.step_length * math.sin(heading_drift(p, k))
    return total


def pdr_rmse(p: PdrParams, n: int) -> PdrErrorEstimate:
    """Both error components after n steps plus their Euclidean combination."""
    s = sigma_s(p, n)
    g = sigma_g(p, n)
    return PdrErrorEstimate(sigma_s=s, sigma_g=g, rmse=math.hypot(s, g))


def error_table(p: PdrParams, n_max: int) -> tuple:
    """(sigma_s, sigma_g) for every n in 1..n_max as float64 arrays.

    Prefix-sum evaluation of the same sums as the scalar operations; entry
    ``[n-1]`` equals ``sigma_s(p, n)`` / ``sigma_g(p, n)`` to float round-off.
    The table is cheap to build once and share across curve steps or grid
    cells.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    drift = p.dmax * np.arange(n_max, dtype=np.float64) * p.step_period
    s_terms = p.step_length * (1.0 - np.cos(drift))
    g_terms = p.step_length * np.sin(drift)
    if p.sigma_sn_scaling == "sqrt_n":
        sn = p.sigma_sn * np.sqrt(np.arange(1, n_max + 1, dtype=np.float64))
    else:
        sn = p.sigma_sn
    return np.cumsum(s_terms) + sn, np.cumsum(g_terms)
