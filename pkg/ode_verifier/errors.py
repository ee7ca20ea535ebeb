from spectral_core.errors import ComputationError


class OscillatorySeed(ComputationError):
    """1/4 - c2 < 0: the solution oscillates without bound at the origin."""


class NumericalOverflow(ComputationError):
    """Numerov propagation produced a non-finite value."""


class NoSignChange(ComputationError):
    """The bracket does not isolate the requested level."""


class InvalidProblem(ComputationError):
    """Inconsistent grid, bracket or matching radius."""
