from spectral_core.errors import ComputationError


class NonPositiveTemperature(ComputationError):
    """mu must be > 0."""


class TruncationOverflow(ComputationError):
    """The direct sum needed more terms than the cap allows."""


class SeriesBreakdown(ComputationError):
    """The Euler-McLaurin value is not positive, so ln Z is undefined.

    Happens far below the temperatures where the truncated series is usable.
    """
