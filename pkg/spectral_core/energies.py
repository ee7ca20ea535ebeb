"""Exponent k, energy roots and the linear-in-n recast of the spectrum."""
import dataclasses
import math
import typing

from spectral_core.errors import (
    InvalidCouplings,
    NegativeDiscriminant,
    NonPositiveOffset,
)
from spectral_core.params import CouplingParams, KVariant, QuantumState


class KRule(typing.NamedTuple):
    """k = scale * ((2 - D) + sqrt((D-2)^2 - 4(a_v^2 - a_s^2) + 4 * sign * L)).

    L is the angular eigenvalue l(l + D - 2).
    """

    angular_sign: int
    scale: float


# Looked up at call time so a rule can be swapped out for mutation checks.
K_RULES: typing.Dict[KVariant, KRule] = {
    KVariant.TABLE1: KRule(angular_sign=-1, scale=1.0),
    KVariant.PRINTED_EQ27: KRule(angular_sign=1, scale=1.0),
    KVariant.HALF_QUADRATIC: KRule(angular_sign=1, scale=0.5),
}


@dataclasses.dataclass(frozen=True)
class EnergyPair:
    e_plus: float
    e_minus: float
    k: float
    discriminant: float


@dataclasses.dataclass(frozen=True)
class LinearSpectrum:
    """E_n / M = vector_ratio + sqrt(A + B n)."""

    A: float
    B: float
    vector_ratio: float

    @property
    def e0(self) -> float:
        return self.vector_ratio + math.sqrt(self.A)

    def energy(self, n: float) -> float:
        return self.vector_ratio + math.sqrt(self.A + self.B * n)

    def gap(self, n: float) -> float:
        """(E_n - E_0) / M, written without cancellation."""
        return self.B * n / (math.sqrt(self.A + self.B * n) + math.sqrt(self.A))


def k_from_rule(params: CouplingParams, state: QuantumState, rule: KRule) -> float:
    """Evaluates the near-origin exponent with an explicit rule.

    Raises:
        NegativeDiscriminant: when the square root argument is negative.
    """
    discriminant = (
        (state.D - 2) ** 2
        - 4.0 * params.coulomb_difference
        + 4.0 * rule.angular_sign * state.angular_eigenvalue
    )
    if discriminant < 0:
        raise NegativeDiscriminant(
            f"no real k for n={state.n}, l={state.l}, D={state.D} "
            f"({state.variant.value}): discriminant {discriminant:.6g}",
            discriminant,
        )
    return rule.scale * ((2 - state.D) + math.sqrt(discriminant))


def k_exponent(params: CouplingParams, state: QuantumState) -> float:
    return k_from_rule(params, state, K_RULES[state.variant])


def k_residual(params: CouplingParams, state: QuantumState, k: float) -> float:
    """k(k-1) + k(D-1) - l(l+D-2) + (a_v^2 - a_s^2); zero for the exact root."""
    return (
        k * (k - 1)
        + k * (state.D - 1)
        - state.angular_eigenvalue
        + params.coulomb_difference
    )


def energy_for_exponent(
    params: CouplingParams, state: QuantumState, k: float
) -> EnergyPair:
    """Solves the energy quadratic for an explicit exponent k.

    E^2 - 2 M r E - (1 - r^2) [M^2 + 2 (a_v b_v - a_s b_s + (k + n + D/2) beta)]
    - M^2 = 0 with r = b_v / b_s, using the cancellation-free root pair.

    Raises:
        InvalidCouplings: if b_s <= 0 or b_s < |b_v|.
        NegativeDiscriminant: if the roots are complex.
    """
    params.validate_closed_form()
    ratio = params.vector_ratio
    beta = params.beta
    M = params.M
    linear = -2.0 * M * ratio
    constant = -(1.0 - ratio**2) * (
        M**2
        + 2.0
        * (
            params.a_v * params.b_v
            - params.a_s * params.b_s
            + (k + state.n + state.D / 2.0) * beta
        )
    ) - M**2
    discriminant = linear**2 - 4.0 * constant
    if discriminant < 0:
        raise NegativeDiscriminant(
            f"complex energies for n={state.n}, l={state.l}, D={state.D}: "
            f"discriminant {discriminant:.6g}",
            discriminant,
        )
    q = -0.5 * (linear + math.copysign(math.sqrt(discriminant), linear))
    if q == 0.0:
        return EnergyPair(0.0, 0.0, k, discriminant)
    roots = (q, constant / q)
    return EnergyPair(max(roots), min(roots), k, discriminant)


def energy_pair(params: CouplingParams, state: QuantumState) -> EnergyPair:
    """Both energy roots of a state with its variant's exponent."""
    return energy_for_exponent(params, state, k_exponent(params, state))


def linear_coefficients(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    variant: KVariant = KVariant.TABLE1,
) -> LinearSpectrum:
    """(A, B) of the recast without the A > 0 check.

    With A <= 0 the ground level has no real energy, but every n with
    A + B n > 0 still satisfies E_n / M = r + sqrt(A + B n).
    """
    params.validate_closed_form()
    if params.M <= 0:
        raise InvalidCouplings("the linear form is in units of M and needs M > 0")
    beta = params.beta
    if beta <= 0:
        raise InvalidCouplings("the linear form needs b_s > |b_v| so that B > 0")
    state = QuantumState(n=0, l=l, D=D, variant=variant, formal=(D == 1 and l > 0))
    k = k_exponent(params, state)
    ratio = params.vector_ratio
    scale = 2.0 / params.M**2 * (1.0 - ratio**2)
    A = 2.0 + scale * (
        params.a_v * params.b_v - params.a_s * params.b_s + (k + D / 2.0) * beta
    )
    return LinearSpectrum(A=A, B=scale * beta, vector_ratio=ratio)


def linear_form(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    variant: KVariant = KVariant.TABLE1,
) -> LinearSpectrum:
    """Recasts the positive branch at fixed (D, l) as E_n / M = r + sqrt(A + B n).

    Arguments:
        params: ``CouplingParams`` Couplings with M > 0 and b_s > |b_v|.
        D: ``int`` Spatial dimension.
        l: ``int`` Orbital index; D = 1 with l > 0 is evaluated formally.
        variant: ``KVariant`` Exponent rule.
    Returns:
        spectrum: ``LinearSpectrum`` with A > 0 and B > 0.
    """
    spectrum = linear_coefficients(params, D, l, variant)
    A = spectrum.A
    if A <= 0:
        raise NonPositiveOffset(f"A = {A:.6g} <= 0 for D={D}, l={l}", A)
    return spectrum
