"""Exceptions shared by every solver in the repository."""
import typing


class ComputationError(Exception):
    """Base class for failures that the CLI reports with exit status 1.

    Arguments:
        message: ``str`` Human readable description of the failure.
        value: ``float`` (Optional) The offending value, kept for reporting.
    """

    def __init__(self, message: str, value: typing.Optional[float] = None):
        super().__init__(message)
        self.value = value

    @property
    def reason(self) -> str:
        return type(self).__name__


class InvalidCouplings(ComputationError):
    """Couplings outside the closed form's domain (b_s < |b_v|, b_s <= 0, ...)."""


class InvalidQuantumState(ComputationError):
    """Quantum numbers outside their stated bounds."""


class NegativeDiscriminant(ComputationError):
    """No real exponent k or no real energy for the requested state."""


class NonPositiveOffset(ComputationError):
    """The linear-in-n recast has A <= 0, so sqrt(A + Bn) is not a spectrum."""
