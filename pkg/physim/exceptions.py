"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
from typing import Optional, Tuple


class PhysimError(Exception):
    """Base class of every error raised by the simulators."""


class InvalidParameter(PhysimError, ValueError):
    """A parameter is out of its documented range."""


class DimensionError(PhysimError, ValueError):
    """Operands do not have compatible shapes."""


class UnsupportedInput(PhysimError, ValueError):
    """The input is well formed but outside of what the machine handles."""


class SimulationFault(PhysimError, RuntimeError):
    """An invariant of the event simulation did not hold."""


class VerificationError(PhysimError):
    """A simulated result differs from its oracle."""

    def __init__(self, message: str, location: Optional[Tuple[int, ...]] = None) -> None:
        super().__init__(message)
        self.location = location


class SweepError(PhysimError):
    """A sweep point failed, *n* is the instance size it was run with."""

    def __init__(self, n: int, error: Exception) -> None:
        super().__init__(f"n={n}: {error}")
        self.n = n
        self.error = error
