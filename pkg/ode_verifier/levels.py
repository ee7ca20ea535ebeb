"""Bound-state search on top of the Numerov shooter, with analytic oracles."""
import dataclasses
import math
import typing

import numpy as np
import tqdm
from scipy import optimize

from ode_verifier.errors import InvalidProblem, NoSignChange
from ode_verifier.numerov import OdeProblem, Shot, integrate, q_coefficients
from spectral_core.energies import energy_pair
from spectral_core.errors import ComputationError, NegativeDiscriminant
from spectral_core.params import CouplingParams, KVariant, QuantumState

DEFAULT_R_MIN = 1e-4
DEFAULT_STEPS = 200000
DEFAULT_TOLERANCE = 1e-8
MAX_SEARCH_STEPS = 200
_SCAN_RADIUS = 1e4


@dataclasses.dataclass(frozen=True)
class OdeEigenvalue:
    E: float
    nodes: int
    mismatch_residual: float
    grid_h: float
    converged: bool
    halving_shift: float


@dataclasses.dataclass(frozen=True)
class ClosedFormComparison:
    nodes: int
    variant: KVariant
    level: OdeEigenvalue
    E_closed: float
    relative_gap: float
    status: str = "ok"


def outer_turning_point(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    E: float,
    r_min: float = DEFAULT_R_MIN,
) -> typing.Optional[float]:
    """Largest r where Q(r; E) turns from positive to negative, if any."""
    r = np.geomspace(r_min, _SCAN_RADIUS, 20001)
    Q = q_coefficients(params, D, l, E).evaluate(r)
    crossings = np.nonzero((Q[:-1] > 0) & (Q[1:] <= 0))[0]
    if crossings.size == 0:
        return None
    i = int(crossings[-1])
    return float(r[i] - Q[i] * (r[i + 1] - r[i]) / (Q[i + 1] - Q[i]))


def make_problem(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    target_nodes: int,
    bracket: typing.Tuple[float, float],
    r_min: float = DEFAULT_R_MIN,
    r_max: typing.Optional[float] = None,
    steps: int = DEFAULT_STEPS,
    tol: float = DEFAULT_TOLERANCE,
    r_match: typing.Optional[float] = None,
) -> OdeProblem:
    """OdeProblem with the default outer radius and step.

    With beta = sqrt(b_s^2 - b_v^2) > 0 the outer radius is
    max(12 / sqrt(beta), r_t + 8 / sqrt(beta)), r_t being the outer turning
    point at the bracket energy of largest magnitude. Without linear
    confinement the level must lie below M and the radius is r_t + 36 / kappa
    with kappa = sqrt(M^2 - E^2) at that energy.
    """
    if params.b_s < abs(params.b_v):
        raise InvalidProblem("b_s < |b_v| leaves no bound states")
    if r_max is None:
        E_top = max(abs(bracket[0]), abs(bracket[1]))
        r_turn = outer_turning_point(params, D, l, E_top, r_min) or r_min
        beta = math.sqrt(params.b_s**2 - params.b_v**2)
        if beta > 0:
            r_max = max(12.0 / math.sqrt(beta), r_turn + 8.0 / math.sqrt(beta))
        elif params.M > E_top:
            r_max = r_turn + 36.0 / math.sqrt(params.M**2 - E_top**2)
        else:
            raise InvalidProblem(
                f"bracket reaches the continuum (|E| >= M = {params.M}); "
                "pass r_max explicitly"
            )
    return OdeProblem(
        params=params,
        D=D,
        l=l,
        r_min=r_min,
        r_max=r_max,
        h=(r_max - r_min) / steps,
        E_bracket=(float(bracket[0]), float(bracket[1])),
        target_nodes=target_nodes,
        tol=tol,
        r_match=r_match,
    )


def default_bracket(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    max_nodes: int,
) -> typing.Tuple[float, float]:
    """(0, E_hi), doubling E_hi until the shooter counts more than max_nodes nodes."""
    beta = math.sqrt(max(params.b_s**2 - params.b_v**2, 0.0))
    if beta <= 0:
        raise InvalidProblem("without linear confinement pass an explicit bracket")
    hi = max(params.M, math.sqrt(beta))
    for _ in range(40):
        problem = make_problem(params, D, l, max_nodes, (0.0, hi))
        if integrate(problem, hi).nodes > max_nodes:
            return 0.0, hi
        hi *= 2.0
    raise NoSignChange(f"no upper bracket found for {max_nodes} nodes", hi)


class _Shooter:
    """Evaluates shots in the search variable x = sign * E, with memoisation."""

    def __init__(self, problem: OdeProblem):
        self.problem = problem
        self.sign = problem.sign
        self._cache: typing.Dict[float, Shot] = {}

    def __call__(self, x: float) -> Shot:
        if x not in self._cache:
            self._cache[x] = integrate(self.problem, self.sign * x)
        return self._cache[x]

    def mismatch(self, x: float) -> float:
        return self(x).mismatch


def _target_point(shooter: _Shooter, lo: float, hi: float, target: int) -> float:
    """Some x in [lo, hi] whose node count equals target, found by bisection."""
    n_lo, n_hi = shooter(lo).nodes, shooter(hi).nodes
    if not n_lo <= target <= n_hi:
        raise NoSignChange(
            f"node counts {n_lo}..{n_hi} in the bracket do not include {target}"
        )
    if n_lo == target:
        return lo
    if n_hi == target:
        return hi
    for _ in range(MAX_SEARCH_STEPS):
        mid = 0.5 * (lo + hi)
        nodes = shooter(mid).nodes
        if nodes == target:
            return mid
        if nodes < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    raise NoSignChange(f"node count skips {target} inside the bracket")


def _partner(
    shooter: _Shooter, start: float, boundary: float, target: int
) -> typing.Optional[typing.Tuple[float, float]]:
    """A point between start and boundary with the target node count and the
    opposite mismatch sign; returns the sorted bracket or None."""
    sign = math.copysign(1.0, shooter.mismatch(start))
    inner, limit, outer = start, boundary, boundary
    for _ in range(MAX_SEARCH_STEPS):
        shot = shooter(outer)
        if shot.nodes == target:
            if math.copysign(1.0, shot.mismatch) != sign:
                return min(inner, outer), max(inner, outer)
            if outer == limit:
                return None
            inner = outer
        else:
            limit = outer
        if abs(limit - inner) <= 1e-15 * max(1.0, abs(limit)):
            return None
        outer = 0.5 * (inner + limit)
    return None


def _solve(problem: OdeProblem) -> typing.Tuple[float, Shot]:
    shooter = _Shooter(problem)
    lo, hi = sorted(problem.sign * e for e in problem.E_bracket)
    target = problem.target_nodes
    x_t = _target_point(shooter, lo, hi, target)
    if shooter.mismatch(x_t) == 0.0:
        return problem.sign * x_t, shooter(x_t)
    first, second = (hi, lo) if shooter.mismatch(x_t) > 0 else (lo, hi)
    bracket = _partner(shooter, x_t, first, target) or _partner(
        shooter, x_t, second, target
    )
    if bracket is None:
        raise NoSignChange(
            f"mismatch keeps its sign over the {target}-node region of the bracket"
        )
    x_root = optimize.brentq(
        shooter.mismatch, bracket[0], bracket[1], xtol=problem.tol * 1e-3, maxiter=500
    )
    return problem.sign * x_root, shooter(x_root)


def find_level(problem: OdeProblem, certify: bool = True) -> OdeEigenvalue:
    """Energy of the level with problem.target_nodes nodes inside problem.E_bracket.

    The node count selects the region of the bracket holding the level and a
    bracketed root search on the log-derivative mismatch refines it. With
    ``certify`` the search is repeated at half the step; the shift between
    the two answers is the step-halving certificate.

    Raises:
        NoSignChange: when the bracket does not isolate the level.
    """
    E, shot = _solve(problem)
    shift = math.nan
    if certify:
        E_half, _ = _solve(dataclasses.replace(problem, h=problem.h / 2.0))
        shift = abs(E - E_half)
    return OdeEigenvalue(
        E=E,
        nodes=shot.nodes,
        mismatch_residual=shot.mismatch,
        grid_h=problem.h,
        converged=certify and shift < problem.tol,
        halving_shift=shift,
    )


def compare_with_closed_form(
    params: CouplingParams,
    D: int,
    l: int,  # noqa: E741
    node_list: typing.Sequence[int],
    variant: KVariant = KVariant.TABLE1,
    bracket: typing.Optional[typing.Tuple[float, float]] = None,
    r_max: typing.Optional[float] = None,
    tol: float = DEFAULT_TOLERANCE,
    progress: bool = False,
) -> typing.List[ClosedFormComparison]:
    """Numerical levels next to the closed-form energy at n = nodes.

    A closed form that cannot be evaluated for these couplings is recorded
    in the row's status with NaN values; the numerical level is kept.
    """
    if bracket is None:
        bracket = default_bracket(params, D, l, max(node_list))
    rows = []
    for nodes in tqdm.tqdm(node_list, desc="Solving levels", disable=not progress):
        problem = make_problem(params, D, l, nodes, bracket, r_max=r_max, tol=tol)
        level = find_level(problem)
        try:
            pair = energy_pair(params, QuantumState(n=nodes, l=l, D=D, variant=variant))
        except ComputationError as error:
            rows.append(
                ClosedFormComparison(
                    nodes, variant, level, math.nan, math.nan, error.reason
                )
            )
            continue
        closed = pair.e_plus if problem.sign > 0 else pair.e_minus
        gap = abs(level.E - closed) / abs(closed) if closed else math.inf
        rows.append(ClosedFormComparison(nodes, variant, level, closed, gap))
    return rows


def oscillator_level(b_s: float, n_r: int, l: int, D: int) -> float:  # noqa: E741
    """Exact level for M = 0, no Coulomb terms and b_v = 0.

    E^2 = b_s (4 n_r + 2 l + D).
    """
    return math.sqrt(b_s * (4 * n_r + 2 * l + D))


def kg_coulomb_level(M: float, a_v: float, n_r: int, l: int) -> float:  # noqa: E741
    """Exact three-dimensional Klein-Gordon level in a vector Coulomb potential."""
    radicand = (l + 0.5) ** 2 - a_v**2
    if radicand < 0:
        raise NegativeDiscriminant(
            f"(l + 1/2)^2 - a_v^2 = {radicand:.6g} < 0", radicand
        )
    effective = n_r + 0.5 + math.sqrt(radicand)
    return M / math.sqrt(1.0 + a_v**2 / effective**2)
