import math

import numpy as np
import pytest

from ode_verifier.errors import InvalidProblem, NoSignChange, OscillatorySeed
from ode_verifier.levels import (
    compare_with_closed_form,
    find_level,
    kg_coulomb_level,
    make_problem,
    oscillator_level,
)
from ode_verifier.numerov import (
    eigenfunction,
    frobenius_seed,
    node_count,
    q_function,
    shoot_mismatch,
)
from spectral_core.params import TABLE1_PARAMS, CouplingParams, KVariant

OSCILLATOR = CouplingParams(a_v=0.0, a_s=0.0, b_v=0.0, b_s=2.0, M=0.0)
COULOMB = CouplingParams(a_v=0.2, a_s=0.0, b_v=0.0, b_s=0.0, M=1.0)


def test_analytic_limits():
    assert oscillator_level(2.0, 0, 0, 3) == pytest.approx(math.sqrt(6.0), rel=1e-15)
    assert kg_coulomb_level(1.0, 0.2, 0, 0) == pytest.approx(0.9789063, abs=1e-7)


def test_oscillator_ground_state():
    problem = make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0))
    level = find_level(problem)
    assert level.E == pytest.approx(2.4494897, abs=1e-6)
    assert level.nodes == 0
    assert level.halving_shift < 1e-8
    assert level.halving_shift < problem.tol
    assert level.converged


def test_coulomb_ground_state():
    level = find_level(make_problem(COULOMB, 3, 0, 0, (0.96, 0.99)))
    assert level.E == pytest.approx(kg_coulomb_level(1.0, 0.2, 0, 0), abs=1e-6)
    assert level.nodes == 0
    assert level.halving_shift < 1e-8


@pytest.mark.parametrize("nodes", [0, 1, 2])
def test_excited_levels_and_their_nodes(nodes):
    problem = make_problem(OSCILLATOR, 3, 0, nodes, (1.0, 5.0))
    level = find_level(problem, certify=False)
    assert level.E == pytest.approx(oscillator_level(2.0, nodes, 0, 3), abs=1e-6)
    assert level.nodes == nodes
    r, u = eigenfunction(problem, level.E)
    assert node_count(u) == nodes
    assert len(r) == len(u)


def test_orbital_excitation_in_higher_dimension():
    problem = make_problem(OSCILLATOR, 4, 2, 0, (3.0, 4.5))
    level = find_level(problem, certify=False)
    assert level.E == pytest.approx(oscillator_level(2.0, 0, 2, 4), abs=1e-6)


def test_mismatch_changes_sign_around_ground_state():
    problem = make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0))
    below, nodes_below = shoot_mismatch(problem, 2.35)
    above, nodes_above = shoot_mismatch(problem, 2.55)
    assert nodes_below == nodes_above == 0
    assert below > 0 > above


def test_node_count_never_decreases_with_energy():
    problem = make_problem(OSCILLATOR, 3, 0, 0, (1.0, 5.4))
    counts = [shoot_mismatch(problem, E)[1] for E in np.linspace(1.0, 5.4, 23)]
    assert counts == sorted(counts)
    assert counts[0] == 0 and counts[-1] >= 3


def test_mismatch_ignores_seed_scale():
    problem = make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0))
    reference, _ = shoot_mismatch(problem, 2.4)
    scaled, _ = shoot_mismatch(problem, 2.4, seed_scale=(1e-30, 7.5e40))
    assert scaled == pytest.approx(reference, rel=1e-9)


def test_bracket_robustness():
    narrow = find_level(make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0)), certify=False)
    wide = find_level(make_problem(OSCILLATOR, 3, 0, 0, (1.9, 3.1)), certify=False)
    assert wide.E == pytest.approx(narrow.E, abs=1e-9)


def test_negative_branch_is_mirrored():
    level = find_level(make_problem(OSCILLATOR, 3, 0, 0, (-3.0, -2.0)), certify=False)
    assert level.E == pytest.approx(-math.sqrt(6.0), abs=1e-6)


def test_step_halving_converges_at_fourth_order():
    energies = []
    for steps in (500, 1000, 2000):
        problem = make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0), steps=steps, tol=1e-13)
        energies.append(find_level(problem, certify=False).E)
    first = abs(energies[0] - energies[1])
    second = abs(energies[1] - energies[2])
    assert first / second >= 8.0


def test_frobenius_seed_follows_leading_power():
    problem = make_problem(COULOMB, 3, 0, 0, (0.96, 0.99))
    r = np.linspace(1e-4, 1e-2, 50)
    u = frobenius_seed(problem, 0.97, r)
    s0 = 0.5 + math.sqrt(0.25 - 0.04)
    assert u[-1] == pytest.approx(1.0, rel=1e-2)
    assert u[0] / u[-1] == pytest.approx((r[0] / r[-1]) ** s0, rel=1e-2)


def test_q_function_matches_oscillator():
    problem = make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0))
    r = np.array([0.5, 1.0, 2.0])
    assert np.allclose(q_function(problem, r, 2.0), 4.0 - 4.0 * r**2, rtol=1e-14)


def test_oscillatory_seed_is_rejected():
    params = CouplingParams(a_v=1.0, a_s=0.0, b_v=0.0, b_s=2.0, M=1.0)
    problem = make_problem(params, 3, 0, 0, (1.0, 2.0))
    with pytest.raises(OscillatorySeed):
        shoot_mismatch(problem, 1.5)


def test_bracket_without_level():
    with pytest.raises(NoSignChange):
        find_level(make_problem(OSCILLATOR, 3, 0, 5, (1.0, 3.0)))
    with pytest.raises(NoSignChange):
        find_level(make_problem(OSCILLATOR, 3, 0, 0, (2.5, 2.7)))


def test_invalid_problems():
    with pytest.raises(InvalidProblem):
        make_problem(OSCILLATOR, 3, 0, 0, (-1.0, 1.0))
    with pytest.raises(InvalidProblem):
        make_problem(OSCILLATOR, 3, 0, 0, (2.0, 3.0), r_min=1.0, r_max=0.5)
    with pytest.raises(InvalidProblem):
        make_problem(OSCILLATOR, 1, 1, 0, (2.0, 3.0))
    with pytest.raises(InvalidProblem):
        make_problem(COULOMB, 3, 0, 0, (0.99, 1.2))
    weak = CouplingParams(a_v=0.2, a_s=6.0, b_v=2.0, b_s=1.0, M=1.0)
    with pytest.raises(InvalidProblem):
        make_problem(weak, 3, 0, 0, (1.0, 2.0))


def test_comparison_with_closed_form():
    rows = compare_with_closed_form(
        OSCILLATOR, 3, 0, [0], KVariant.HALF_QUADRATIC, bracket=(2.0, 3.0)
    )
    assert len(rows) == 1
    assert rows[0].status == "ok"
    assert rows[0].E_closed == pytest.approx(math.sqrt(6.0), rel=1e-14)
    assert rows[0].relative_gap < 1e-6


def test_comparison_records_failed_closed_form():
    rows = compare_with_closed_form(COULOMB, 3, 0, [0], bracket=(0.96, 0.99))
    assert rows[0].status == "InvalidCouplings"
    assert math.isnan(rows[0].E_closed)
    assert rows[0].level.E == pytest.approx(kg_coulomb_level(1.0, 0.2, 0, 0), abs=1e-6)


def test_published_couplings_gaps_per_variant():
    rows = {
        variant: compare_with_closed_form(TABLE1_PARAMS, 3, 0, [0], variant)[0]
        for variant in KVariant
    }
    levels = {row.level.E for row in rows.values()}
    assert len(levels) == 1
    assert all(row.level.nodes == 0 for row in rows.values())
    assert rows[KVariant.TABLE1].status == "ok"
    assert rows[KVariant.TABLE1].relative_gap == pytest.approx(0.613, abs=0.01)
    for row in rows.values():
        if row.status == "ok":
            assert math.isfinite(row.relative_gap)
            expected = abs(row.level.E - row.E_closed) / abs(row.E_closed)
            assert row.relative_gap == pytest.approx(expected, rel=1e-12)
        else:
            assert math.isnan(row.relative_gap)
