"""Partition function of E_n / M = r + sqrt(A + B n).

Energies are measured from the ground level, so every Boltzmann weight is
exp(-(sqrt(A + B n) - sqrt(A)) / mu) with the reduced temperature
mu = k_B T / M.
"""
import dataclasses
import math
import typing

import numpy as np

from spectral_core.energies import LinearSpectrum, k_exponent
from spectral_core.params import CouplingParams, KVariant, QuantumState
from thermodynamics.errors import (
    NonPositiveTemperature,
    SeriesBreakdown,
    TruncationOverflow,
)

DEFAULT_TOLERANCE = 1e-10
TRUNCATION_CAP = 10**8
_FIRST_CHUNK = 4096
_MAX_CHUNK = 2**20


@dataclasses.dataclass(frozen=True)
class EulerMcLaurinConstants:
    """Bernoulli numbers used by the truncated Euler-McLaurin sum (up to i = 2)."""

    B2: float = 1.0 / 6.0
    B4: float = -1.0 / 30.0


EULER_MCLAURIN = EulerMcLaurinConstants()


def check_temperature(mu: float) -> None:
    if not mu > 0 or not math.isfinite(mu):
        raise NonPositiveTemperature(f"mu must be a finite value > 0, got {mu}", mu)


@dataclasses.dataclass(frozen=True)
class DirectSums:
    """Truncated sums of w_n, w_n eps_n and w_n eps_n^2 with w_n = exp(-eps_n / mu)."""

    weight: float
    first: float
    second: float
    terms: int

    @property
    def mean_gap(self) -> float:
        return self.first / self.weight

    @property
    def gap_variance(self) -> float:
        return max(self.second / self.weight - self.mean_gap**2, 0.0)


def tail_bound(spec: LinearSpectrum, mu: float, last: int) -> float:
    """Upper bound on sum_{n > last} of the weights.

    The weight decreases in n, so the tail is below the integral from `last`,
    which is (2/B)(mu s + mu^2) exp(-(s - sqrt(A)) / mu) with s = sqrt(A + B last).
    """
    s = math.sqrt(spec.A + spec.B * last)
    return 2.0 / spec.B * (mu * s + mu**2) * math.exp(-spec.gap(last) / mu)


def direct_sums(
    spec: LinearSpectrum,
    mu: float,
    tol: float = DEFAULT_TOLERANCE,
    cap: int = TRUNCATION_CAP,
) -> DirectSums:
    """Sums the Boltzmann weights chunk by chunk until the tail is below tol * Z."""
    check_temperature(mu)
    weight = first = second = 0.0
    start, chunk = 0, _FIRST_CHUNK
    while True:
        n = np.arange(start, start + chunk, dtype=float)
        gaps = spec.B * n / (np.sqrt(spec.A + spec.B * n) + math.sqrt(spec.A))
        w = np.exp(-gaps / mu)
        weight += float(w.sum())
        first += float((w * gaps).sum())
        second += float((w * gaps**2).sum())
        last = start + chunk - 1
        if tail_bound(spec, mu, last) < tol * weight:
            return DirectSums(weight, first, second, last + 1)
        start += chunk
        chunk = min(chunk * 2, _MAX_CHUNK)
        if start > cap:
            raise TruncationOverflow(
                f"direct sum at mu={mu} needs more than {cap} terms", start
            )


def partition_direct(
    spec: LinearSpectrum,
    mu: float,
    tol: float = DEFAULT_TOLERANCE,
    cap: int = TRUNCATION_CAP,
) -> float:
    """Reference Z(mu) by explicit summation, relative truncation error below tol."""
    return direct_sums(spec, mu, tol, cap).weight


class EulerMcLaurinIngredients(typing.NamedTuple):
    """f(0), its integral over [0, inf), f'(0) and f'''(0).

    f(x) = exp(-gap(x) / mu) with the gap continued to real x.
    """

    f0: float
    integral: float
    d1: float
    d3: float


def em_ingredients(spec: LinearSpectrum, mu: float) -> EulerMcLaurinIngredients:
    check_temperature(mu)
    A, B = spec.A, spec.B
    root = math.sqrt(A)
    return EulerMcLaurinIngredients(
        f0=1.0,
        integral=2.0 * root / B * mu + 2.0 / B * mu**2,
        d1=-B / (2.0 * root * mu),
        d3=-3.0 * B**3 / (8.0 * A**2.5 * mu)
        - 3.0 * B**3 / (8.0 * A**2 * mu**2)
        - B**3 / (8.0 * A**1.5 * mu**3),
    )


@dataclasses.dataclass(frozen=True)
class LaurentSeries:
    """sum_p c_p mu^p with integer powers, differentiated term by term."""

    coefficients: typing.Dict[int, float]

    def value(self, mu: float) -> float:
        return sum(c * mu**p for p, c in self.coefficients.items())

    def derivative(self, mu: float, order: int = 1) -> float:
        total = 0.0
        for p, c in self.coefficients.items():
            factor = 1.0
            for j in range(order):
                factor *= p - j
            if factor:
                total += c * factor * mu ** (p - order)
        return total


def em_series(
    spec: LinearSpectrum, constants: EulerMcLaurinConstants = EULER_MCLAURIN
) -> LaurentSeries:
    """Laurent series of Z_EM = f(0)/2 + integral - B2/2! f'(0) - B4/4! f'''(0)."""
    A, B = spec.A, spec.B
    root = math.sqrt(A)
    b4_term = constants.B4 * B**3 / 192.0
    return LaurentSeries(
        {
            2: 2.0 / B,
            1: 2.0 * root / B,
            0: 0.5,
            -1: constants.B2 * B / (4.0 * root) + 3.0 * b4_term / A**2.5,
            -2: 3.0 * b4_term / A**2,
            -3: b4_term / A**1.5,
        }
    )


def partition_em(spec: LinearSpectrum, mu: float) -> float:
    """Closed-form Z(mu) from the Euler-McLaurin sum truncated after B4."""
    check_temperature(mu)
    value = em_series(spec).value(mu)
    if value <= 0:
        raise SeriesBreakdown(
            f"Euler-McLaurin partition function is {value:.6g} at mu={mu}", mu
        )
    return value


def partition_printed(alpha: float, delta: float, mu: float) -> float:
    """The closed-form partition function exactly as published.

    Diagnostic only: it disagrees with the direct sum by a few percent.
    """
    check_temperature(mu)
    root = math.sqrt(delta)
    correction = alpha**3 / (60.0 * mu**3 * root**3) * (
        (delta / alpha**3 - 2.0 / delta) * mu**2 - 2.0 / root * mu - 1.0
    )
    return 0.5 + mu / (2.0 * alpha) * (mu + root) + correction


def printed_identifications(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    variant: KVariant = KVariant.TABLE1,
) -> typing.Tuple[float, float]:
    """(alpha, delta) as the published recast identifies them."""
    params.validate_closed_form()
    ratio = params.vector_ratio
    beta = params.beta
    k = k_exponent(params, QuantumState(0, l, D, variant, formal=(D == 1 and l > 0)))
    scale = (1.0 - ratio**2) / params.M**2
    alpha = beta * scale / 2.0
    delta = 2.0 * scale * (
        params.a_v * params.b_v - params.a_s * params.b_s + beta * (k + D / 2.0)
    )
    return alpha, delta
