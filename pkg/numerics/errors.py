"""Exception hierarchy shared by every clocklab package."""


class ClockLabError(Exception):
    """Base class for all errors raised by the lab."""


class ValidationError(ClockLabError, ValueError):
    """Input violates a documented precondition."""


class StepSizeError(ValidationError):
    """Numerov stability bound |2M(E-U)h^2/hbar^2| < 1 violated."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"Numerov step too large at node {index}: |2M(E-U)h^2/hbar^2| = {value:.4g} >= 1"
        )

    def __reduce__(self):
        return type(self), (self.index, self.value)


class EvanescentModeError(ValidationError):
    """A system mode has E_n >= E, so its clock factor would not propagate."""

    def __init__(self, mode, mode_energy, energy):
        self.mode = mode
        self.mode_energy = mode_energy
        self.energy = energy
        super().__init__(
            f"mode {mode} is evanescent: E_n = {mode_energy:.6g} >= E = {energy:.6g}"
        )

    def __reduce__(self):
        return type(self), (self.mode, self.mode_energy, self.energy)


class DomainError(ValidationError):
    """Argument outside the domain of a map (e.g. alpha = 0)."""


class ResourceError(ClockLabError, RuntimeError):
    """A dense object would exceed the configured size cap."""
