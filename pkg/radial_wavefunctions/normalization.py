"""Normalisation of R(r) against the measure r^(D-1) dr.

The published constant C = n! sqrt(2 beta^h / Gamma(h)), h = k + n + D/2, is
exact only when alpha_tilde = 0. The quadrature constant is exact for any
alpha_tilde; the squared ratio of the two is reported as the deviation factor.
"""
import math
import typing

import numpy as np
from scipy import integrate, special

from radial_wavefunctions.errors import GammaDomain, QuadratureNonConvergence
from spectral_core.energies import k_exponent
from spectral_core.params import CouplingParams, QuantumState

if typing.TYPE_CHECKING:
    from radial_wavefunctions.wavefunction import RadialWavefunction

GAMMA_ARGUMENT_MAX = 171.0
TAIL_TOLERANCE = 1e-14
QUADRATURE_EPSREL = 1e-13
QUADRATURE_LIMIT = 500


def log_norm_paper(beta: float, k: float, n: int, D: int) -> float:
    h = k + n + D / 2.0
    if not 0 < h <= GAMMA_ARGUMENT_MAX:
        raise GammaDomain(f"Gamma argument h = {h:.6g} outside (0, 171]", h)
    return float(
        special.gammaln(n + 1)
        + 0.5 * (math.log(2.0) + h * math.log(beta) - special.gammaln(h))
    )


def norm_paper(params: CouplingParams, state: QuantumState) -> float:
    """The published normalisation constant C for a state."""
    k = k_exponent(params, state)
    try:
        return math.exp(log_norm_paper(params.beta, k, state.n, state.D))
    except OverflowError:
        raise GammaDomain(f"normalisation constant overflows at n = {state.n}", state.n)


def _peak(wf: "RadialWavefunction") -> float:
    """Maximum of ln(R^2 r^(D-1)): root of 2 beta r^2 + 2 alpha_tilde r - p."""
    a = wf.alpha_tilde
    return (-a + math.sqrt(a * a + 2.0 * wf.beta * wf.power)) / (2.0 * wf.beta)


def quadrature_cutoff(wf: "RadialWavefunction", rel: float = TAIL_TOLERANCE) -> float:
    """Smallest radius, in steps of the peak width, with tail below rel of the total.

    ln(R^2 r^(D-1)) is concave, so the tail beyond r is bounded by
    exp(phi(r)) / |phi'(r)|; the integral is taken from the Laplace estimate.
    """
    peak = _peak(wf)
    curvature = wf.power / peak**2 + 2.0 * wf.beta
    width = 1.0 / math.sqrt(curvature)
    log_total = float(wf.log_density(peak)) + 0.5 * math.log(2.0 * math.pi / curvature)
    r = peak + width
    for _ in range(100000):
        slope = wf.power / r - 2.0 * wf.beta * r - 2.0 * wf.alpha_tilde
        log_tail = float(wf.log_density(r)) - math.log(-slope)
        if log_tail - log_total < math.log(rel):
            return r
        r += width
    raise QuadratureNonConvergence(f"no cutoff found below r = {r:.6g}", r)


def log_norm_quadrature(
    wf: "RadialWavefunction", r_max: typing.Optional[float] = None
) -> float:
    """ln C such that the integral of R^2 r^(D-1) over [0, r_max] equals 1."""
    if r_max is None:
        r_max = quadrature_cutoff(wf)
    peak = _peak(wf)
    log_peak = float(wf.log_density(peak))

    def integrand(r: float) -> float:
        if r <= 0:
            return 0.0
        return math.exp(float(wf.log_density(r)) - log_peak)

    points = [x for x in (peak / 4.0, peak, 2.0 * peak) if 0 < x < r_max]
    result = integrate.quad(
        integrand,
        0.0,
        r_max,
        points=points or None,
        epsabs=0.0,
        epsrel=QUADRATURE_EPSREL,
        limit=QUADRATURE_LIMIT,
        full_output=1,
    )
    if len(result) > 3:
        raise QuadratureNonConvergence(result[3].strip().splitlines()[0], result[1])
    scaled = result[0]
    if not scaled > 0:
        raise QuadratureNonConvergence(f"integral evaluated to {scaled}", scaled)
    log_integral = log_peak + math.log(scaled) - 2.0 * float(special.gammaln(wf.n + 1))
    return -0.5 * log_integral


def norm_quadrature(
    wf: "RadialWavefunction", r_max: typing.Optional[float] = None
) -> float:
    return math.exp(log_norm_quadrature(wf, r_max))


def deviation_factor(wf: "RadialWavefunction") -> float:
    """Integral of R^2 r^(D-1) with the wave function's own constant."""
    return math.exp(2.0 * (wf.log_C - log_norm_quadrature(wf)))


def density_integral_simpson(
    wf: "RadialWavefunction",
    r_max: typing.Optional[float] = None,
    nodes: int = 10**6 + 1,
) -> float:
    """Composite Simpson integral of R^2 r^(D-1) on a uniform grid."""
    if r_max is None:
        r_max = quadrature_cutoff(wf)
    r = np.linspace(0.0, r_max, nodes)
    R = wf.evaluate(r)
    return float(integrate.simpson(R**2 * r ** (wf.D - 1), x=r))
