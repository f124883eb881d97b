"""Mean values from extended or conditional density matrices."""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from mixed.conditional import ConditionalDensityMatrix, conditional_density
from mixed.density import ExtendedDensityMatrix, check_dense_size
from numerics.errors import ValidationError
from numerics.grid import trapezoid_weights


@dataclass(frozen=True)
class Probability:
    q0: float
    qc0: float = None


@dataclass(frozen=True)
class OperatorMean:
    operator: Union[np.ndarray, Callable]
    qc0: float = None
    normalize: bool = True


@dataclass(frozen=True)
class GeneralKernel:
    kernel: np.ndarray


def _conditional(density, qc0):
    if isinstance(density, ConditionalDensityMatrix):
        return density
    if qc0 is None:
        raise ValidationError("a clock reading qc0 is needed to condition an extended density matrix")
    return conditional_density(density, qc0)


def probability(density, q0, qc0=None):
    """rho(q0, q0; qc0)."""
    rho = _conditional(density, qc0)
    i = rho.grid.locate(q0)
    return float(np.real(rho.values[i, i]))


def operator_mean(operator, density, qc0=None, normalize=True):
    """Sp(f rho) with the trapezoid weights closing the trace.

    `operator` is a matrix acting on grid samples, or a function of position
    (a diagonal operator).
    """
    rho = _conditional(density, qc0)
    w = trapezoid_weights(rho.grid)
    if callable(operator):
        f_rho = operator(rho.grid.points)[:, None] * rho.values
    else:
        f = np.asarray(operator)
        if f.shape != rho.values.shape:
            raise ValidationError(f"operator has shape {f.shape}, density has {rho.values.shape}")
        f_rho = f @ rho.values
    mean = complex(np.sum(np.diag(f_rho) * w))
    if normalize:
        mean /= rho.trace()
    return mean


def general_kernel(kernel, density):
    """Full contraction sum phi(b, a) R(a, b) w_a w_b over the composite index."""
    if not isinstance(density, ExtendedDensityMatrix):
        raise ValidationError("general kernels contract extended density matrices")
    check_dense_size(density.dim)
    phi = np.asarray(kernel)
    if phi.shape != density.values.shape:
        raise ValidationError(f"kernel has shape {phi.shape}, density has {density.values.shape}")
    w = density.quadrature
    return complex(np.sum(phi.T * density.values * np.outer(w, w)))


def grid_delta_kernel(density, q0, qc0):
    """Kernel whose contraction returns rho(q0, q0; qc0); deltas are indicator / h.

    Valid at interior nodes, where the trapezoid weight equals the spacing.
    """
    i = density.system_grid.locate(q0)
    j = density.clock_grid.locate(qc0)
    if i in (0, density.system_grid.n - 1) or j in (0, density.clock_grid.n - 1):
        raise ValidationError("grid deltas are defined at interior nodes only")
    a = i * density.clock_grid.n + j
    phi = np.zeros(density.values.shape)
    phi[a, a] = 1.0 / (density.system_grid.h * density.clock_grid.h) ** 2
    return phi


def expectation(target, density):
    if isinstance(target, Probability):
        return probability(density, target.q0, target.qc0)
    if isinstance(target, OperatorMean):
        return operator_mean(target.operator, density, target.qc0, target.normalize)
    if isinstance(target, GeneralKernel):
        return general_kernel(target.kernel, density)
    raise ValidationError(f"unknown expectation target {type(target).__name__}")
