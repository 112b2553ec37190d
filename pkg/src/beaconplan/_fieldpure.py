"""Vectorized NumPy implementation of the per-cell field kernels.

Fallback backend with the same contract as the compiled module
``beaconplan._fieldcore``; see ``beaconplan.fields`` for dispatch.
Inputs are flat float64 arrays of cell centers and beacon coordinates.
"""

from __future__ import annotations

import numpy as np


def strength_field(cx, cy, bx, by, p0, beta, d0, d_min):
    """Strongest predicted mean power (dBm) per cell, max over beacons."""
    dx = bx[None, :] - cx[:, None]
    dy = by[None, :] - cy[:, None]
    d = np.maximum(np.hypot(dx, dy), d_min)
    levels = p0 - 10.0 * beta * np.log10(d / d0)
    return levels.max(axis=1)


def crlb_field(cx, cy, bx, by, coeff, d_min, max_range, det_eps):
    """Per-cell CRLB axis variances plus nearest-beacon distance.

    Returns (var_x, var_y, nearest) float64 arrays; variances are +inf
    where no beacon is audible or the information matrix is singular
    (determinant <= det_eps). ``nearest`` is the true (unclamped) distance
    to the closest beacon regardless of audibility, +inf with no beacons.
    """
    n = cx.shape[0]
    if bx.shape[0] == 0:
        inf = np.full(n, np.inf)
        return inf, inf.copy(), inf.copy()
    dx = bx[None, :] - cx[:, None]
    dy = by[None, :] - cy[:, None]
    d = np.hypot(dx, dy)
    nearest = d.min(axis=1)
    dc = np.maximum(d, d_min)
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(d > 0.0, dx / d, 1.0)
        uy = np.where(d > 0.0, dy / d, 0.0)
    w = np.where(dc <= max_range, 1.0 / (dc * dc), 0.0)
    sxx = np.einsum("ij,ij,ij->i", ux, ux, w)
    syy = np.einsum("ij,ij,ij->i", uy, uy, w)
    sxy = np.einsum("ij,ij,ij->i", ux, uy, w)
    jxx = coeff * sxx
    jyy = coeff * syy
    jxy = coeff * sxy
    det = jxx * jyy - jxy * jxy
    ok = det > det_eps
    var_x = np.full(n, np.inf)
    var_y = np.full(n, np.inf)
    np.divide(jyy, det, out=var_x, where=ok)
    np.divide(jxx, det, out=var_y, where=ok)
    return var_x, var_y, nearest
