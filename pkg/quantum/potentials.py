"""Named potentials with analytic slopes.

Scenario configs refer to potentials by name + parameters; system and clock
potentials share this catalog.
"""

from dataclasses import asdict, dataclass

import numpy as np

from numerics.errors import ValidationError


@dataclass(frozen=True)
class Box:
    """Flat floor; the walls come from the Dirichlet boundary."""

    def __call__(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def slope(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))


@dataclass(frozen=True)
class Constant:
    value: float = 0.0

    def __call__(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.value)

    def slope(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))


@dataclass(frozen=True)
class LinearRamp:
    kappa: float
    offset: float = 0.0

    def __call__(self, q):
        return self.offset + self.kappa * np.asarray(q, dtype=float)

    def slope(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.kappa)


@dataclass(frozen=True)
class Harmonic:
    stiffness: float = 1.0
    center: float = 0.0

    def __call__(self, q):
        return 0.5 * self.stiffness * (np.asarray(q, dtype=float) - self.center) ** 2

    def slope(self, q):
        return self.stiffness * (np.asarray(q, dtype=float) - self.center)


@dataclass(frozen=True)
class DoubleWell:
    depth: float = 1.0
    separation: float = 1.0

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        b = 0.5 * self.separation
        return self.depth * ((q / b) ** 2 - 1.0) ** 2

    def slope(self, q):
        q = np.asarray(q, dtype=float)
        b = 0.5 * self.separation
        return 4.0 * self.depth * ((q / b) ** 2 - 1.0) * q / b**2


@dataclass(frozen=True)
class GaussianBarrier:
    height: float = 1.0
    width: float = 1.0
    center: float = 0.0

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        return self.height * np.exp(-0.5 * ((q - self.center) / self.width) ** 2)

    def slope(self, q):
        q = np.asarray(q, dtype=float)
        return -(q - self.center) / self.width**2 * self(q)


POTENTIALS = {
    "box": Box,
    "constant": Constant,
    "linear_ramp": LinearRamp,
    "harmonic": Harmonic,
    "double_well": DoubleWell,
    "gaussian_barrier": GaussianBarrier,
}


def make_potential(name, **params):
    cls = POTENTIALS.get(name)
    if cls is None:
        raise ValidationError(f"unknown potential {name!r}; choose from {', '.join(POTENTIALS)}")
    try:
        return cls(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for potential {name!r}: {exc}") from None


def potential_name(potential):
    for name, cls in POTENTIALS.items():
        if type(potential) is cls:
            return name
    return type(potential).__name__


def describe_potential(potential):
    return {"name": potential_name(potential), **asdict(potential)}
