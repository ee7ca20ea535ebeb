"""Free energy, mean energy, entropy and heat capacity from ln Z(mu).

With beta = 1 / (M mu) the canonical definitions become, in units of M,
F = -mu ln Z, U = mu^2 (ln Z)', S = ln Z + mu (ln Z)' and
Cv = 2 mu (ln Z)' + mu^2 (ln Z)''.
"""
import dataclasses
import enum
import math
import typing

import numpy as np
import tqdm

from spectral_core.energies import LinearSpectrum
from thermodynamics.errors import NonPositiveTemperature
from thermodynamics.partition import (
    DEFAULT_TOLERANCE,
    check_temperature,
    direct_sums,
    em_series,
    partition_em,
)


class Method(enum.Enum):
    DIRECT = "direct"
    EULER_MCLAURIN = "em"

    @classmethod
    def from_tag(cls, tag: str) -> "Method":
        for method in cls:
            if method.value == tag:
                return method
        raise ValueError(f"unknown method {tag!r}, expected 'direct' or 'em'")


@dataclasses.dataclass(frozen=True)
class ThermoPoint:
    mu: float
    Z: float
    F_bar: float
    U_bar: float
    S_bar: float
    Cv_bar: float


@dataclasses.dataclass(frozen=True)
class HighTemperatureLimit:
    """Leading large-mu behaviour: Z ~ 2 mu^2 / B, U ~ 2 mu, Cv ~ 2."""

    Z: float
    U_bar: float
    Cv_bar: float


def _from_log_derivatives(
    mu: float, Z: float, d1: float, d2: float
) -> ThermoPoint:
    log_z = math.log(Z)
    return ThermoPoint(
        mu=mu,
        Z=Z,
        F_bar=-mu * log_z,
        U_bar=mu**2 * d1,
        S_bar=log_z + mu * d1,
        Cv_bar=2.0 * mu * d1 + mu**2 * d2,
    )


def thermo_point(
    spec: LinearSpectrum,
    mu: float,
    method: Method = Method.EULER_MCLAURIN,
    tol: float = DEFAULT_TOLERANCE,
) -> ThermoPoint:
    """All thermal quantities at one reduced temperature.

    Arguments:
        spec: ``LinearSpectrum`` The recast spectrum (A > 0, B > 0).
        mu: ``float`` Reduced temperature k_B T / M, > 0.
        method: ``Method`` Closed-form series or explicit summation.
        tol: ``float`` Relative truncation tolerance of the direct sum.
    Returns:
        point: ``ThermoPoint`` in units of M.
    """
    check_temperature(mu)
    if method is Method.DIRECT:
        sums = direct_sums(spec, mu, tol)
        mean = sums.mean_gap
        d1 = mean / mu**2
        d2 = sums.gap_variance / mu**4 - 2.0 * mean / mu**3
        return _from_log_derivatives(mu, sums.weight, d1, d2)
    series = em_series(spec)
    Z = partition_em(spec, mu)
    d1 = series.derivative(mu, 1) / Z
    d2 = series.derivative(mu, 2) / Z - d1**2
    return _from_log_derivatives(mu, Z, d1, d2)


def thermo_curve(
    spec: LinearSpectrum,
    mu_min: float,
    mu_max: float,
    points: int,
    method: Method = Method.EULER_MCLAURIN,
    tol: float = DEFAULT_TOLERANCE,
    progress: bool = False,
) -> typing.List[ThermoPoint]:
    """Thermal quantities on an evenly spaced grid that includes both ends."""
    if not 0 < mu_min < mu_max:
        raise NonPositiveTemperature(
            f"need 0 < mu_min < mu_max, got [{mu_min}, {mu_max}]", mu_min
        )
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    grid = np.linspace(mu_min, mu_max, points)
    return [
        thermo_point(spec, float(mu), method, tol)
        for mu in tqdm.tqdm(grid, desc="Evaluating thermal curve", disable=not progress)
    ]


def high_temperature_limits(spec: LinearSpectrum, mu: float) -> HighTemperatureLimit:
    check_temperature(mu)
    return HighTemperatureLimit(Z=2.0 * mu**2 / spec.B, U_bar=2.0 * mu, Cv_bar=2.0)
