# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-slot sensor sweeps.

Arithmetic is kept in the exact order of the numpy fallback (and built with
FP contraction off) so both backends agree bit-for-bit.
"""

import numpy as np

from libc.math cimport sqrt

BACKEND = "cython"


def sense_sweep(double[::1] energy, alive, double[::1] draws, double[::1] last_draw):
    """Apply one sensing-phase consumption draw to every alive sensor.

    In-place counterpart of the numpy backend; returns the number of deaths.
    """
    cdef unsigned char[::1] alive_v = alive.view(np.uint8)
    cdef Py_ssize_t i, n = energy.shape[0]
    cdef int deaths = 0
    for i in range(n):
        if alive_v[i]:
            last_draw[i] = draws[i]
            energy[i] = energy[i] - draws[i]
            if energy[i] <= 0.0:
                energy[i] = 0.0
                alive_v[i] = 0
                deaths += 1
        else:
            last_draw[i] = 0.0
    return deaths


def charge_sweep(
    double[::1] xs,
    double[::1] ys,
    double[::1] energy,
    alive,
    double cx,
    double cy,
    double dz2,
    double alpha,
    double beta,
    double d_max,
    double p0,
    double rx_threshold,
    double tau,
    double e_max,
    double[::1] powers,
):
    """One charger's charging sweep over all sensors (see numpy backend)."""
    cdef unsigned char[::1] alive_v = alive.view(np.uint8)
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef double dx, dy, d, db, pr, e, p
    for i in range(n):
        p = 0.0
        if alive_v[i]:
            dx = xs[i] - cx
            dy = ys[i] - cy
            d = sqrt(dx * dx + dy * dy + dz2)
            if d <= d_max:
                db = d + beta
                pr = p0 * (alpha / (db * db))
                if pr >= rx_threshold:
                    p = pr
                    e = energy[i] + pr * tau
                    energy[i] = e_max if e > e_max else e
        powers[i] = p
