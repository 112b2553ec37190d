# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-cell field kernels: the hot loop of map evaluation.

Same contract as the NumPy fallback ``beaconplan._fieldpure``; see
``beaconplan.fields`` for dispatch. The annealing objective evaluates
these over the whole raster for every candidate layout, so the inner
cell x beacon loop dominates total runtime.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log10, sqrt

cnp.import_array()


def strength_field(double[::1] cx, double[::1] cy, double[::1] bx, double[::1] by,
                   double p0, double beta, double d0, double d_min):
    cdef Py_ssize_t n = cx.shape[0]
    cdef Py_ssize_t m = bx.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef double dx, dy, d, level, best
    for i in range(n):
        best = -INFINITY
        for k in range(m):
            dx = bx[k] - cx[i]
            dy = by[k] - cy[i]
            d = sqrt(dx * dx + dy * dy)
            if d < d_min:
                d = d_min
            level = p0 - 10.0 * beta * log10(d / d0)
            if level > best:
                best = level
        o[i] = best
    return out


def crlb_field(double[::1] cx, double[::1] cy, double[::1] bx, double[::1] by,
               double coeff, double d_min, double max_range, double det_eps):
    cdef Py_ssize_t n = cx.shape[0]
    cdef Py_ssize_t m = bx.shape[0]
    var_x = np.empty(n, dtype=np.float64)
    var_y = np.empty(n, dtype=np.float64)
    nearest = np.empty(n, dtype=np.float64)
    cdef double[::1] vx = var_x
    cdef double[::1] vy = var_y
    cdef double[::1] nr = nearest
    cdef Py_ssize_t i, k
    cdef double dx, dy, d, dc, ux, uy, w
    cdef double sxx, sxy, syy, jxx, jxy, jyy, det, dmin_seen
    for i in range(n):
        sxx = 0.0
        sxy = 0.0
        syy = 0.0
        dmin_seen = INFINITY
        for k in range(m):
            dx = bx[k] - cx[i]
            dy = by[k] - cy[i]
            d = sqrt(dx * dx + dy * dy)
            if d < dmin_seen:
                dmin_seen = d
            dc = d if d > d_min else d_min
            if dc > max_range:
                continue
            if d > 0.0:
                ux = dx / d
                uy = dy / d
            else:
                ux = 1.0
                uy = 0.0
            w = 1.0 / (dc * dc)
            sxx += ux * ux * w
            sxy += ux * uy * w
            syy += uy * uy * w
        nr[i] = dmin_seen
        jxx = coeff * sxx
        jyy = coeff * syy
        jxy = coeff * sxy
        det = jxx * jyy - jxy * jxy
        if det > det_eps:
            vx[i] = jyy / det
            vy[i] = jxx / det
        else:
            vx[i] = INFINITY
            vy[i] = INFINITY
    return var_x, var_y, nearest
