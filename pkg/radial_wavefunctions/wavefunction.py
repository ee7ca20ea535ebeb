"""R(r) = C / n! r^(k+n) exp(-beta r^2 / 2 - alpha_tilde r), evaluated in log space."""
import dataclasses
import typing

import numpy as np
from scipy import special

from radial_wavefunctions.errors import NonPositiveExponent
from radial_wavefunctions.normalization import (
    log_norm_paper,
    log_norm_quadrature,
    quadrature_cutoff,
)
from spectral_core.energies import energy_pair, k_exponent
from spectral_core.errors import InvalidCouplings, InvalidQuantumState
from spectral_core.params import Branch, CouplingParams, QuantumState


@dataclasses.dataclass(frozen=True)
class RadialWavefunction:
    k: float
    n: int
    beta: float
    alpha_tilde: float
    log_C: float
    D: int
    energy: float

    @property
    def power(self) -> float:
        """Exponent p of r in R^2 r^(D-1)."""
        return 2.0 * (self.k + self.n) + self.D - 1

    def log_density(self, r: np.ndarray) -> np.ndarray:
        """ln(R^2 r^(D-1)) up to the constant 2 (log_C - ln n!)."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            log_r = np.log(r)
        return self.power * log_r - self.beta * r**2 - 2.0 * self.alpha_tilde * r

    def evaluate(self, r: typing.Union[float, np.ndarray]) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.log(r)
            log_value = (
                self.log_C
                - special.gammaln(self.n + 1)
                + (self.k + self.n) * log_r
                - self.beta * r**2 / 2.0
                - self.alpha_tilde * r
            )
        return np.where(r > 0, np.exp(log_value), 0.0)

    def with_log_norm(self, log_C: float) -> "RadialWavefunction":
        return dataclasses.replace(self, log_C=log_C)


def build_wavefunction(
    params: CouplingParams, state: QuantumState, branch: Branch = Branch.PLUS
) -> RadialWavefunction:
    """Closed-form wave function carrying the published normalisation constant.

    Raises:
        InvalidQuantumState: for formal (D = 1, l > 0) states.
        NonPositiveExponent: when k <= 0.
        GammaDomain: when k + n + D/2 leaves (0, 171].
    """
    params.validate_closed_form()
    if state.formal:
        raise InvalidQuantumState(
            "wave functions need a physical state (D = 1 requires l = 0)"
        )
    beta = params.beta
    if beta <= 0:
        raise InvalidCouplings("the wave function needs b_s > |b_v| to be normalisable")
    k = k_exponent(params, state)
    if k <= 0:
        raise NonPositiveExponent(f"k = {k:.6g} <= 0, R(r) is not regular at r = 0", k)
    pair = energy_pair(params, state)
    energy = pair.e_plus if branch is Branch.PLUS else pair.e_minus
    alpha_tilde = (energy * params.a_v + params.M * params.a_s) / beta
    return RadialWavefunction(
        k=k,
        n=state.n,
        beta=beta,
        alpha_tilde=alpha_tilde,
        log_C=log_norm_paper(beta, k, state.n, state.D),
        D=state.D,
        energy=energy,
    )


@dataclasses.dataclass(frozen=True)
class WavefunctionSamples:
    r: np.ndarray
    R_paper: np.ndarray
    R_exact: np.ndarray


def sample_wavefunction(
    wf: RadialWavefunction,
    r_min: float,
    r_max: typing.Optional[float],
    samples: int,
) -> WavefunctionSamples:
    """Samples R with the published and the quadrature normalisation on a uniform grid.

    r_max defaults to the quadrature cutoff.
    """
    if r_max is None:
        r_max = quadrature_cutoff(wf)
    if not 0 <= r_min < r_max:
        raise ValueError(f"need 0 <= r_min < r_max, got [{r_min}, {r_max}]")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    r = np.linspace(r_min, r_max, samples)
    exact = wf.with_log_norm(log_norm_quadrature(wf))
    return WavefunctionSamples(r=r, R_paper=wf.evaluate(r), R_exact=exact.evaluate(r))
