"""Numerov integration of chi'' = (2M/hbar^2)(U - E) chi on a uniform grid."""

import logging

import numpy as np
from numba import njit

from numerics.errors import StepSizeError, ValidationError

logger = logging.getLogger(__name__)


@njit(cache=True)
def _numerov_recurrence(w, y):
    # w_i = 1 - h^2 f_i / 12; y[0], y[1] are the seeds
    for i in range(1, len(w) - 1):
        y[i + 1] = ((12.0 - 10.0 * w[i]) * y[i] - w[i - 1] * y[i - 1]) / w[i + 1]
    return y


def numerov_solve(potential, energy, init, grid, mass=1.0, hbar=1.0):
    """March the seeds init = (chi(q_0), chi(q_1)) across `grid`.

    Fourth-order accurate while |2M(E-U)h^2/hbar^2| < 1 at every node; the
    first node breaking that bound raises StepSizeError.
    """
    u = np.asarray(potential, dtype=float)
    if u.ndim == 0:
        u = np.full(grid.n, float(u))
    if u.shape != (grid.n,):
        raise ValidationError(f"potential has shape {u.shape}, grid has {grid.n} nodes")
    if not np.all(np.isfinite(u)):
        raise ValidationError("potential has non-finite samples")
    if len(init) != 2:
        raise ValidationError("Numerov needs exactly two seed values")

    f = (2.0 * mass / hbar**2) * (u - energy)
    stiffness = np.abs(f) * grid.h**2
    bad = np.flatnonzero(stiffness >= 1.0)
    if bad.size:
        raise StepSizeError(int(bad[0]), float(stiffness[bad[0]]))

    w = 1.0 - grid.h**2 * f / 12.0
    y = np.zeros(grid.n, dtype=complex)
    y[0], y[1] = init
    _numerov_recurrence(w.astype(complex), y)

    if all(np.isreal(s) for s in init):
        return y.real.copy()
    return y
