import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from evaluation.utils import stable_derivative
from spectral_core.energies import LinearSpectrum, linear_form
from spectral_core.params import TABLE1_PARAMS
from thermodynamics.errors import (
    NonPositiveTemperature,
    SeriesBreakdown,
    TruncationOverflow,
)
from thermodynamics.partition import (
    direct_sums,
    em_ingredients,
    partition_direct,
    partition_em,
    partition_printed,
    printed_identifications,
    tail_bound,
)
from thermodynamics.quantities import (
    Method,
    high_temperature_limits,
    thermo_curve,
    thermo_point,
)


@pytest.fixture
def spec():
    return linear_form(TABLE1_PARAMS, 3, 0)


def boltzmann(spec, mu):
    def f(x):
        return math.exp(-(math.sqrt(spec.A + spec.B * x) - math.sqrt(spec.A)) / mu)

    return f


def test_printed_closed_form_value():
    assert partition_printed(1.0, 4.0, 1.0) == pytest.approx(2.003125, rel=1e-12)


def test_printed_identifications_relate_to_linear_form(spec):
    alpha, delta = printed_identifications(TABLE1_PARAMS, 3, 0)
    assert alpha == pytest.approx(spec.B / 4.0, rel=1e-12)
    assert delta == pytest.approx(spec.A - 2.0, rel=1e-12)


def test_printed_closed_form_is_off_by_a_few_percent(spec):
    alpha, delta = printed_identifications(TABLE1_PARAMS, 3, 0)
    gap = abs(partition_printed(alpha, delta, 5.0) / partition_direct(spec, 5.0) - 1.0)
    assert 0.005 < gap < 0.05


def test_em_matches_direct_sum(spec):
    for mu in np.linspace(0.5, 20.0, 200):
        direct = partition_direct(spec, mu, tol=1e-10)
        tolerance = 1e-3 if mu >= 2.0 else 1e-2
        assert partition_em(spec, mu) == pytest.approx(direct, rel=tolerance)


def test_direct_sum_tail_bound_holds():
    spec = LinearSpectrum(A=4.0, B=1.0, vector_ratio=0.0)
    mu, last = 1.0, 40
    tail = sum(
        math.exp(-spec.gap(n) / mu) for n in range(last + 1, 200000)
    )
    assert 0 < tail <= tail_bound(spec, mu, last)


def test_direct_sum_reaches_requested_tolerance(spec):
    sums = direct_sums(spec, 10.0, tol=1e-12)
    assert tail_bound(spec, 10.0, sums.terms - 1) < 1e-12 * sums.weight


def test_direct_sum_matches_brute_force():
    spec = LinearSpectrum(A=28.14053, B=3.999996, vector_ratio=0.0)
    f = boltzmann(spec, 5.0)
    reference = math.fsum(f(n) for n in range(20000))
    assert partition_direct(spec, 5.0, tol=1e-10) == pytest.approx(reference, rel=1e-10)


def test_direct_sum_increases_with_temperature(spec):
    values = [partition_direct(spec, mu) for mu in np.linspace(0.05, 20.0, 60)]
    assert all(b > a for a, b in zip(values[:-1], values[1:]))


@settings(deadline=None, max_examples=25)
@given(st.floats(0.5, 60.0), st.floats(0.5, 8.0), st.floats(0.01, 20.0))
def test_direct_sum_is_at_least_one(A, B, mu):
    spec = LinearSpectrum(A=A, B=B, vector_ratio=0.0)
    assert partition_direct(spec, mu) >= 1.0


def test_truncation_cap(spec):
    with pytest.raises(TruncationOverflow):
        partition_direct(spec, 20.0, cap=1000)


def test_em_ingredients_match_numerical_derivatives(spec):
    mu = 1.0
    f = boltzmann(spec, mu)
    ingredients = em_ingredients(spec, mu)
    h = 1e-5
    d1 = (f(h) - f(-h)) / (2 * h)
    assert ingredients.d1 == pytest.approx(d1, rel=1e-8)
    h = 1e-2
    d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h**3)
    assert ingredients.d3 == pytest.approx(d3, rel=1e-3)
    integral, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert ingredients.integral == pytest.approx(integral, rel=1e-9)
    assert ingredients.f0 == 1.0


def test_temperature_must_be_positive(spec):
    for mu in (0.0, -1.0, math.nan):
        with pytest.raises(NonPositiveTemperature):
            partition_direct(spec, mu)
        with pytest.raises(NonPositiveTemperature):
            partition_em(spec, mu)
    with pytest.raises(NonPositiveTemperature):
        thermo_curve(spec, 2.0, 1.0, 10)


def test_em_series_breaks_down_when_frozen(spec):
    with pytest.raises(SeriesBreakdown):
        partition_em(spec, 0.01)


def test_frozen_limit_is_exact(spec):
    point = thermo_point(spec, 1e-4, Method.DIRECT)
    assert point.Z == 1.0
    assert point.F_bar == 0.0
    assert point.U_bar == 0.0
    assert point.S_bar == 0.0
    assert point.Cv_bar == 0.0


@pytest.mark.parametrize("method", list(Method))
def test_thermodynamic_identities(spec, method):
    for p in thermo_curve(spec, 0.5, 20.0, 200, method):
        assert abs(p.F_bar - (p.U_bar - p.mu * p.S_bar)) <= 1e-10
        assert abs(p.S_bar - (math.log(p.Z) + p.U_bar / p.mu)) <= 1e-10
        assert p.F_bar == pytest.approx(-p.mu * math.log(p.Z), rel=1e-14, abs=1e-14)


@pytest.mark.parametrize(
    "method,mus,tol",
    [
        (Method.EULER_MCLAURIN, [1.0, 3.0, 10.0, 25.0, 50.0], 1e-10),
        (Method.DIRECT, [1.0, 5.0, 20.0], 1e-14),
    ],
)
def test_heat_capacity_is_derivative_of_mean_energy(spec, method, mus, tol):
    for mu in mus:
        slope = stable_derivative(
            lambda x: thermo_point(spec, x, method, tol).U_bar, mu, 1e-3 * mu
        )
        cv = thermo_point(spec, mu, method, tol).Cv_bar
        assert cv == pytest.approx(slope, rel=1e-5)


@pytest.mark.parametrize("method", list(Method))
def test_curve_shapes(spec, method):
    curve = thermo_curve(spec, 0.5, 20.0, 200, method)
    free = [p.F_bar for p in curve]
    mean = [p.U_bar for p in curve]
    assert all(b < a for a, b in zip(free, free[1:]))
    assert all(b > a for a, b in zip(mean, mean[1:]))


def test_curve_grid_includes_both_ends(spec):
    curve = thermo_curve(spec, 0.5, 20.0, 7)
    assert len(curve) == 7
    assert curve[0].mu == 0.5
    assert curve[-1].mu == 20.0


def test_high_temperature_limits(spec):
    far = thermo_point(spec, 1000.0)
    limit = high_temperature_limits(spec, 1000.0)
    assert far.U_bar / far.mu == pytest.approx(2.0, abs=0.05)
    assert far.Cv_bar == pytest.approx(limit.Cv_bar, abs=0.05)
    assert far.Z == pytest.approx(limit.Z, rel=0.02)
    assert thermo_point(spec, 100.0).Cv_bar == pytest.approx(2.0, abs=0.05)


def test_mean_energy_approaches_limit_slowly(spec):
    near = thermo_point(spec, 100.0)
    far = thermo_point(spec, 1000.0)
    assert abs(far.U_bar / far.mu - 2.0) < abs(near.U_bar / near.mu - 2.0)
    assert abs(near.U_bar / near.mu - 2.0) == pytest.approx(
        math.sqrt(spec.A) / 100.0, rel=0.1
    )


@settings(deadline=None, max_examples=25)
@given(st.floats(10.0, 60.0), st.floats(0.5, 4.0), st.floats(1.0, 10.0))
def test_em_identities_for_random_spectra(A, B, mu):
    spec = LinearSpectrum(A=A, B=B, vector_ratio=0.0)
    p = thermo_point(spec, mu)
    assert abs(p.F_bar - (p.U_bar - mu * p.S_bar)) <= 1e-10 * max(1.0, abs(p.U_bar))
    assert p.Cv_bar > 0
