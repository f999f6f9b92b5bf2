"""Numpy fallback for the per-slot sensor sweeps.

These mirror the compiled kernels operation-for-operation (same expression
trees, same rounding order, no FP contraction on the compiled side), so both
backends produce bit-identical arrays.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def sense_sweep(energy, alive, draws, last_draw):
    """Apply one sensing-phase consumption draw to every alive sensor.

    energy/alive/last_draw are updated in place; a sensor whose energy
    reaches <= 0 is clamped to 0 and marked dead. Returns the number of
    deaths this sweep.
    """
    was_alive = alive.copy()
    np.copyto(last_draw, np.where(was_alive, draws, 0.0))
    np.copyto(energy, np.where(was_alive, energy - draws, energy))
    newly_dead = was_alive & (energy <= 0.0)
    energy[newly_dead] = 0.0
    alive[newly_dead] = False
    return int(np.count_nonzero(newly_dead))


def charge_sweep(
    xs,
    ys,
    energy,
    alive,
    cx,
    cy,
    dz2,
    alpha,
    beta,
    d_max,
    p0,
    rx_threshold,
    tau,
    e_max,
    powers,
):
    """One charger's charging sweep over all sensors.

    Fills ``powers`` with the received power of every sensor that qualifies
    (alive, within d_max of the charger at squared height offset dz2, and at
    or above the reception threshold), zero elsewhere, and adds the harvested
    energy min(P*tau, headroom) to ``energy`` in place.
    """
    dx = xs - cx
    dy = ys - cy
    d = np.sqrt(dx * dx + dy * dy + dz2)
    db = d + beta
    pr = p0 * (alpha / (db * db))
    ok = alive & (d <= d_max) & (pr >= rx_threshold)
    np.copyto(powers, np.where(ok, pr, 0.0))
    np.copyto(energy, np.where(ok, np.minimum(e_max, energy + pr * tau), energy))
