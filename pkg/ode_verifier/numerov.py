"""Numerov shooting for u'' + Q(r; E) u = 0 on [r_min, r_max].

u(r) = r^((D-1)/2) R(r) and

    Q = E^2 - M^2 - 2 (a_v b_v - a_s b_s) + 2 (E a_v + M a_s) / r
        + c2 / r^2 - beta^2 r^2 - 2 (E b_v + M b_s) r,
    c2 = a_v^2 - a_s^2 - l (l + D - 2) - (D - 1) (D - 3) / 4.
"""
import dataclasses
import math
import typing

import numba
import numpy as np

from ode_verifier.errors import InvalidProblem, NumericalOverflow, OscillatorySeed
from spectral_core.params import CouplingParams

RESCALE_LIMIT = 1e150
SERIES_STEPS = 60
SERIES_MAX_TERMS = 400


@dataclasses.dataclass(frozen=True)
class OdeProblem:
    """One eigenvalue search on a uniform grid r_min + i h.

    A bracket with E_hi <= 0 selects the negative branch. r_match pins the
    matching radius; otherwise the outer turning point of each trial energy
    is used.
    """

    params: CouplingParams
    D: int
    l: int  # noqa: E741
    r_min: float
    r_max: float
    h: float
    E_bracket: typing.Tuple[float, float]
    target_nodes: int
    tol: float
    r_match: typing.Optional[float] = None

    def __post_init__(self):
        if self.D < 1 or self.l < 0 or (self.D == 1 and self.l > 0):
            raise InvalidProblem(f"invalid (D, l) = ({self.D}, {self.l})")
        if not 0 < self.r_min < self.r_max:
            raise InvalidProblem(
                f"need 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]"
            )
        if not 0 < self.h <= (self.r_max - self.r_min) / 10:
            raise InvalidProblem(f"step h = {self.h} too large for the grid", self.h)
        lo, hi = self.E_bracket
        if not lo < hi:
            raise InvalidProblem(f"empty bracket [{lo}, {hi}]")
        if lo < 0 < hi:
            raise InvalidProblem(f"bracket [{lo}, {hi}] straddles zero")
        if self.target_nodes < 0:
            raise InvalidProblem(f"target_nodes must be >= 0, got {self.target_nodes}")
        if self.tol <= 0:
            raise InvalidProblem(f"tol must be > 0, got {self.tol}", self.tol)
        if self.r_match is not None and not self.r_min < self.r_match < self.r_max:
            raise InvalidProblem(f"r_match = {self.r_match} off the grid", self.r_match)

    @property
    def steps(self) -> int:
        return int(round((self.r_max - self.r_min) / self.h))

    @property
    def grid(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.steps + 1)

    @property
    def sign(self) -> int:
        return -1 if self.E_bracket[1] <= 0 else 1


@dataclasses.dataclass(frozen=True)
class QCoefficients:
    """Q(r) = c2 / r^2 + q1 / r + q0 + q3 r + q4 r^2."""

    c2: float
    q1: float
    q0: float
    q3: float
    q4: float

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.c2 / r**2 + self.q1 / r + self.q0 + self.q3 * r + self.q4 * r**2

    @property
    def seed_exponent(self) -> float:
        """Regular root s0 of s (s - 1) + c2 = 0."""
        radicand = 0.25 - self.c2
        if radicand < 0:
            raise OscillatorySeed(
                f"1/4 - c2 = {radicand:.6g} < 0, no regular solution at r = 0", radicand
            )
        return 0.5 + math.sqrt(radicand)


def q_coefficients(
    params: CouplingParams, D: int, l: int, E: float  # noqa: E741
) -> QCoefficients:
    return QCoefficients(
        c2=params.coulomb_difference - l * (l + D - 2) - (D - 1) * (D - 3) / 4.0,
        q1=2.0 * (E * params.a_v + params.M * params.a_s),
        q0=E**2
        - params.M**2
        - 2.0 * (params.a_v * params.b_v - params.a_s * params.b_s),
        q3=-2.0 * (E * params.b_v + params.M * params.b_s),
        q4=-(params.b_s**2 - params.b_v**2),
    )


def q_function(problem: OdeProblem, r: np.ndarray, E: float) -> np.ndarray:
    return q_coefficients(problem.params, problem.D, problem.l, E).evaluate(r)


def series_coefficients(coeffs: QCoefficients, r_ref: float) -> np.ndarray:
    """b_m = a_m r_ref^m of u = r^s0 sum_m a_m r^m, truncated once negligible."""
    s = coeffs.seed_exponent
    scaled = (
        coeffs.q1 * r_ref,
        coeffs.q0 * r_ref**2,
        coeffs.q3 * r_ref**3,
        coeffs.q4 * r_ref**4,
    )
    b = [1.0]
    total = 1.0
    for m in range(1, SERIES_MAX_TERMS):
        acc = 0.0
        for j, q in enumerate(scaled, start=1):
            if m - j >= 0:
                acc += q * b[m - j]
        b.append(-acc / (m * (2.0 * s + m - 1.0)))
        total += abs(b[m])
        if m > 4 and max(abs(x) for x in b[-4:]) < 1e-18 * total:
            break
    return np.array(b)


def frobenius_seed(problem: OdeProblem, E: float, r: np.ndarray) -> np.ndarray:
    """Regular solution near the origin, scaled to (r / r.max())^s0 at leading order."""
    r = np.asarray(r, dtype=float)
    coeffs = q_coefficients(problem.params, problem.D, problem.l, E)
    r_ref = float(r.max())
    b = series_coefficients(coeffs, r_ref)
    t = r / r_ref
    return t**coeffs.seed_exponent * np.polyval(b[::-1], t)


def node_count(u: np.ndarray) -> int:
    """Sign changes of u, ignoring exact zeros."""
    nonzero = np.asarray(u)[np.asarray(u) != 0]
    signs = np.signbit(nonzero)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@numba.njit
def numerov_outward(u, f, start, stop):
    """Fills u[start + 1 .. stop] from u[start - 1], u[start]; False on overflow."""
    for i in range(start, stop):
        u[i + 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i - 1] * u[i - 1]) / f[i + 1]
        size = abs(u[i + 1])
        if not math.isfinite(size):
            return False
        if size > RESCALE_LIMIT:
            for j in range(i + 2):
                u[j] /= size
    return True


@numba.njit
def numerov_inward(u, f, start, stop):
    """Fills u[stop .. start - 1] from u[start], u[start + 1]; False on overflow."""
    for i in range(start, stop, -1):
        u[i - 1] = ((12.0 - 10.0 * f[i]) * u[i] - f[i + 1] * u[i + 1]) / f[i - 1]
        size = abs(u[i - 1])
        if not math.isfinite(size):
            return False
        if size > RESCALE_LIMIT:
            for j in range(i - 1, u.shape[0]):
                u[j] /= size
    return True


class Shot(typing.NamedTuple):
    r: np.ndarray
    u_left: np.ndarray
    u_right: np.ndarray
    i_match: int
    mismatch: float
    nodes: int


def matching_index(problem: OdeProblem, Q: np.ndarray) -> int:
    """Grid index of r_match, or of the outermost point where Q turns negative."""
    if problem.r_match is not None:
        return int(round((problem.r_match - problem.r_min) / problem.h))
    crossings = np.nonzero((Q[:-1] > 0) & (Q[1:] <= 0))[0]
    if crossings.size == 0:
        return problem.steps // 2
    return int(crossings[-1])


def _tail_log_step(problem: OdeProblem, E: float, coeffs: QCoefficients) -> float:
    """ln(u(r_max - h) / u(r_max)) of the decaying solution."""
    params = problem.params
    beta_squared = -coeffs.q4
    r_last = problem.r_min + problem.h * problem.steps
    r_prev = r_last - problem.h
    if beta_squared > 0:
        beta = math.sqrt(beta_squared)
        slope = (E * params.b_v + params.M * params.b_s) / beta

        def log_u(r):
            return -beta * r**2 / 2.0 - slope * r

        return log_u(r_prev) - log_u(r_last)
    if params.M**2 > E**2:
        return problem.h * math.sqrt(params.M**2 - E**2)
    q_mid = float(coeffs.evaluate(r_last - problem.h / 2.0))
    return problem.h * math.sqrt(max(-q_mid, 0.0))


def five_point_derivative(u: np.ndarray, i: int, h: float) -> float:
    return (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h)


def integrate(
    problem: OdeProblem,
    E: float,
    seed_scale: typing.Tuple[float, float] = (1.0, 1.0),
) -> Shot:
    """Outward and inward Numerov solutions and their log-derivative mismatch.

    Arguments:
        problem: ``OdeProblem`` Grid and couplings.
        E: ``float`` Trial energy.
        seed_scale: ``Tuple[float, float]`` Factors applied to the outward and
            inward seeds; the mismatch does not depend on them.
    Returns:
        shot: ``Shot`` with W = u_L'/u_L - u_R'/u_R at r_match and the number
            of sign changes of u_L on (r_min, r_match].
    """
    r = problem.grid
    N = problem.steps
    coeffs = q_coefficients(problem.params, problem.D, problem.l, E)
    Q = coeffs.evaluate(r)
    f = 1.0 + problem.h**2 * Q / 12.0
    i_match = matching_index(problem, Q)
    r_switch = min(
        max(problem.r_min + problem.h, SERIES_STEPS * problem.h), 0.1 * r[i_match]
    )
    i_switch = max(1, int((r_switch - problem.r_min) / problem.h))
    i_match = min(max(i_match, i_switch + 3), N - 3)
    if np.any(f[i_switch - 1 :] <= 0):
        raise InvalidProblem(
            f"step h = {problem.h} too coarse for Q at E = {E}", problem.h
        )

    u_left = np.zeros(N + 1)
    seed = frobenius_seed(problem, E, r[: i_switch + 1])
    u_left[: i_switch + 1] = seed_scale[0] * seed
    if not numerov_outward(u_left, f, i_switch, i_match + 2):
        raise NumericalOverflow(f"outward integration overflowed at E = {E}", E)

    u_right = np.zeros(N + 1)
    u_right[N] = seed_scale[1]
    u_right[N - 1] = seed_scale[1] * math.exp(_tail_log_step(problem, E, coeffs))
    if not numerov_inward(u_right, f, N - 1, i_match - 2):
        raise NumericalOverflow(f"inward integration overflowed at E = {E}", E)

    left = five_point_derivative(u_left, i_match, problem.h) / u_left[i_match]
    right = five_point_derivative(u_right, i_match, problem.h) / u_right[i_match]
    return Shot(
        r=r,
        u_left=u_left,
        u_right=u_right,
        i_match=i_match,
        mismatch=float(left - right),
        nodes=node_count(u_left[: i_match + 1]),
    )


def shoot_mismatch(
    problem: OdeProblem,
    E: float,
    seed_scale: typing.Tuple[float, float] = (1.0, 1.0),
) -> typing.Tuple[float, int]:
    shot = integrate(problem, E, seed_scale)
    return shot.mismatch, shot.nodes


def eigenfunction(
    problem: OdeProblem, E: float
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """u on the whole grid, the inward piece scaled to meet the outward one."""
    shot = integrate(problem, E)
    i = shot.i_match
    scale = shot.u_left[i] / shot.u_right[i]
    u = np.concatenate([shot.u_left[: i + 1], scale * shot.u_right[i + 1 :]])
    return shot.r, u
