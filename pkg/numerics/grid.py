"""Uniform 1D grids, trapezoid quadrature and finite-difference derivatives.

Everything here is plain numerics: fields are numpy arrays whose sampled
axis has one entry per grid node. No quantum semantics live in this module.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from numerics.errors import ValidationError

logger = logging.getLogger(__name__)

# Boundary nodes per edge that carry one-sided stencils or are excluded from
# residual norms.
RESIDUAL_MARGIN = 2


@dataclass(frozen=True)
class Grid:
    """Uniform sampling q_min + i*h, i = 0..n-1."""

    q_min: float
    q_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"grid needs n >= 3 points, got {self.n}")
        if not np.isfinite(self.q_min) or not np.isfinite(self.q_max):
            raise ValidationError("grid bounds must be finite")
        if self.q_max <= self.q_min:
            raise ValidationError(f"grid bounds reversed: [{self.q_min}, {self.q_max}]")

    @property
    def h(self):
        return (self.q_max - self.q_min) / (self.n - 1)

    @property
    def length(self):
        return self.q_max - self.q_min

    @cached_property
    def points(self):
        pts = self.q_min + self.h * np.arange(self.n, dtype=float)
        pts.flags.writeable = False
        return pts

    def locate(self, value):
        """Index of the node equal to `value`; off-grid values are rejected."""
        pos = (value - self.q_min) / self.h
        idx = int(round(pos))
        if idx < 0 or idx >= self.n or abs(pos - idx) > 1e-9:
            raise ValidationError(
                f"{value!r} is not a node of the grid [{self.q_min}, {self.q_max}] with n={self.n}"
            )
        return idx

    def refined(self):
        """Same interval with the spacing halved."""
        return Grid(self.q_min, self.q_max, 2 * self.n - 1)

    def describe(self):
        return f"[{self.q_min:g}, {self.q_max:g}] n={self.n} h={self.h:.4g}"


def interior_slice(grid_or_n, margin=RESIDUAL_MARGIN):
    """Slice selecting nodes that are at least `margin` away from either edge."""
    n = grid_or_n.n if isinstance(grid_or_n, Grid) else int(grid_or_n)
    if n <= 2 * margin:
        raise ValidationError(f"{n} nodes leave no interior with margin {margin}")
    return slice(margin, n - margin)


def trapezoid_weights(grid):
    w = np.full(grid.n, grid.h)
    w[0] = w[-1] = 0.5 * grid.h
    return w


def _check_axis(field, grid, axis, name="field"):
    if field.ndim == 0 or field.shape[axis] != grid.n:
        raise ValidationError(
            f"{name} has {field.shape[axis] if field.ndim else 0} samples on axis {axis}, grid has {grid.n}"
        )


def integrate(f, g=None, *, grid, mode="inner_product", axis=-1):
    """Trapezoid integration on `grid`.

    inner_product: integral of f * conj(g) dq (g defaults to 1).
    cumulative: running antiderivative of f, zero at q_min.
    """
    f = np.asarray(f)
    if f.ndim == 0:
        f = np.full(grid.n, f, dtype=np.result_type(f, float))
    _check_axis(f, grid, axis)

    if mode == "cumulative":
        if g is not None:
            raise ValidationError("cumulative mode takes a single field")
        return cumulative_trapezoid(f, dx=grid.h, axis=axis, initial=0)
    if mode != "inner_product":
        raise ValidationError(f"unknown integration mode {mode!r}")

    if g is None:
        integrand = f
    else:
        g = np.asarray(g)
        if g.ndim == 0:
            g = np.full(grid.n, g, dtype=np.result_type(g, float))
        _check_axis(g, grid, axis, name="second field")
        integrand = f * np.conj(g)
    return trapezoid(integrand, dx=grid.h, axis=axis)


def derivative_field(f, grid, order=1, axis=-1):
    """Second-order finite-difference derivative along `axis`.

    Interior nodes use central differences; the first and last node use
    one-sided second-order stencils. Residual checks drop those nodes through
    `interior_slice`.
    """
    f = np.asarray(f)
    _check_axis(f, grid, axis)
    if grid.n < 5:
        raise ValidationError("derivatives need at least 5 grid nodes")
    h = grid.h

    if order == 1:
        return np.gradient(f, h, axis=axis, edge_order=2)
    if order != 2:
        raise ValidationError(f"derivative order must be 1 or 2, got {order}")

    y = np.moveaxis(f, axis, -1)
    out = np.empty(y.shape, dtype=np.result_type(y, float))
    out[..., 1:-1] = (y[..., 2:] - 2.0 * y[..., 1:-1] + y[..., :-2]) / h**2
    out[..., 0] = (2.0 * y[..., 0] - 5.0 * y[..., 1] + 4.0 * y[..., 2] - y[..., 3]) / h**2
    out[..., -1] = (2.0 * y[..., -1] - 5.0 * y[..., -2] + 4.0 * y[..., -3] - y[..., -4]) / h**2
    return np.moveaxis(out, -1, axis)


def field_norm(field, grids, margins=None):
    """Trapezoid L2 norm of a field sampled on a product of `grids`.

    `margins` drops that many boundary nodes per edge on each axis before
    integrating (0 keeps the whole axis).
    """
    field = np.asarray(field)
    if field.ndim != len(grids):
        raise ValidationError(f"field has {field.ndim} axes but {len(grids)} grids were given")
    margins = margins or [0] * len(grids)
    density = np.abs(field) ** 2
    for axis in reversed(range(len(grids))):
        grid, margin = grids[axis], margins[axis]
        _check_axis(density, grid, axis)
        if margin:
            density = np.take(density, np.arange(grid.n)[interior_slice(grid, margin)], axis=axis)
        density = trapezoid(density, dx=grid.h, axis=axis)
    return float(np.sqrt(density))
