from spectral_core.errors import ComputationError


class NonPositiveExponent(ComputationError):
    """k <= 0: the wave function is not regular at the origin."""


class GammaDomain(ComputationError):
    """Gamma function argument outside (0, 171]."""


class QuadratureNonConvergence(ComputationError):
    """Adaptive quadrature did not reach the requested accuracy."""
