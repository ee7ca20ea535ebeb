#!/usr/bin/python3
"""Acceptance checks for the closed forms, the thermodynamics and the ODE solver.

Every criterion runs even when an earlier one fails. Each prints one PASS or
FAIL line with its measured values; the exit status is 0 only if all pass.
"""
import argparse
import dataclasses
import math
import time
import typing

import inflect
import numpy as np
import ujson as json

from evaluation.utils import (
    finite_or_none,
    load_table1,
    relative_gap,
    stable_derivative,
    strictly_monotone,
)
from ode_verifier.levels import (
    find_level,
    kg_coulomb_level,
    make_problem,
    oscillator_level,
)
from radial_wavefunctions.normalization import (
    deviation_factor,
    density_integral_simpson,
    log_norm_quadrature,
)
from radial_wavefunctions.wavefunction import build_wavefunction
from spectral_core.energies import (
    K_RULES,
    KRule,
    energy_for_exponent,
    energy_pair,
    k_from_rule,
    linear_coefficients,
    linear_form,
)
from spectral_core.errors import ComputationError
from spectral_core.params import TABLE1_PARAMS, CouplingParams, KVariant, QuantumState
from spectral_core.table import grid_cells, spectrum_table
from thermodynamics.partition import (
    partition_direct,
    partition_em,
    partition_printed,
    printed_identifications,
)
from thermodynamics.quantities import Method, thermo_curve, thermo_point

TABLE1_TOLERANCE = 1.5e-3
TABLE1_DIMS = range(1, 7)
TABLE1_NMAX = 5
DEVIATION_FACTOR_BAND = (1.5e-7, 1.9e-7)

Measured = typing.Dict[str, typing.Any]


@dataclasses.dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: Measured
    error: typing.Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        values = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        if self.error:
            values = ", ".join(filter(None, [values, f"error={self.error}"]))
        return f"[{status}] {self.number:>2}. {self.name}: {values}"


def _short(value: typing.Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def table1_deviation(rule: typing.Optional[KRule] = None) -> Measured:
    """Largest distance between computed and published energies over the table.

    Without a rule the table is evaluated through ``spectrum_table``; with a
    rule every cell uses that exponent instead.
    """
    published = load_table1()
    start = time.perf_counter()
    if rule is None:
        rows = spectrum_table(TABLE1_PARAMS, TABLE1_DIMS, TABLE1_NMAX, KVariant.TABLE1)
        energies = {(r.n, r.l, r.D): (r.e_plus, r.e_minus) for r in rows}
    else:
        energies = {}
        for n, l, D in grid_cells(TABLE1_DIMS, TABLE1_NMAX):
            state = QuantumState(n, l, D, KVariant.TABLE1, formal=(D == 1 and l > 0))
            try:
                k = k_from_rule(TABLE1_PARAMS, state, rule)
                pair = energy_for_exponent(TABLE1_PARAMS, state, k)
                energies[(n, l, D)] = (pair.e_plus, pair.e_minus)
            except ComputationError:
                energies[(n, l, D)] = (math.nan, math.nan)
    elapsed = time.perf_counter() - start

    deviations = []
    for cell, (e_plus, e_minus) in published.items():
        computed = energies.get(cell, (math.nan, math.nan))
        deviations.append(abs(computed[0] - e_plus))
        deviations.append(abs(computed[1] - e_minus))
    worst = max(deviations) if all(math.isfinite(d) for d in deviations) else math.inf
    return {
        "cells": len(energies),
        "expected_cells": len(published),
        "max_deviation": worst,
        "seconds": elapsed,
        "energies": energies,
    }


def check_table1() -> typing.Tuple[bool, Measured]:
    result = table1_deviation()
    passed = (
        result["cells"] == result["expected_cells"]
        and result["max_deviation"] <= TABLE1_TOLERANCE
        and result["seconds"] < 1.0
    )
    result.pop("energies")
    return passed, result


def check_vieta() -> typing.Tuple[bool, Measured]:
    expected = 2.0 * TABLE1_PARAMS.M * TABLE1_PARAMS.vector_ratio
    rows = spectrum_table(TABLE1_PARAMS, TABLE1_DIMS, TABLE1_NMAX)
    worst = max(abs(r.e_plus + r.e_minus - expected) for r in rows)
    return worst <= 1e-9, {"max_sum_error": worst}


def check_linear_form() -> typing.Tuple[bool, Measured]:
    pairs = sorted({(D, l) for _, l, D in grid_cells(TABLE1_DIMS, TABLE1_NMAX)})
    worst = 0.0
    checked = skipped = 0
    for D, l in pairs:
        spec = linear_coefficients(TABLE1_PARAMS, D, l)
        for n in range(51):
            # Levels below the real-energy threshold have no closed form to match
            if spec.A + spec.B * n <= 0:
                skipped += 1
                continue
            state = QuantumState(n, l, D, formal=(D == 1 and l > 0))
            closed = energy_pair(TABLE1_PARAMS, state).e_plus
            worst = max(worst, relative_gap(TABLE1_PARAMS.M * spec.energy(n), closed))
            checked += 1
    return worst <= 1e-12, {
        "pairs": len(pairs),
        "levels": checked,
        "levels_without_real_energy": skipped,
        "max_relative_error": worst,
    }


def _default_spectrum():
    return linear_form(TABLE1_PARAMS, 3, 0)


def check_partition_oracle() -> typing.Tuple[bool, Measured]:
    spec = _default_spectrum()
    start = time.perf_counter()
    low = high = 0.0
    for mu in np.linspace(0.5, 20.0, 200):
        direct = partition_direct(spec, mu, tol=1e-10)
        gap = relative_gap(partition_em(spec, mu), direct)
        if mu >= 2.0:
            high = max(high, gap)
        else:
            low = max(low, gap)
    elapsed = time.perf_counter() - start
    passed = high <= 1e-3 and low <= 1e-2 and elapsed < 10.0
    return passed, {
        "max_gap_mu_2_20": high,
        "max_gap_mu_below_2": low,
        "seconds": elapsed,
    }


def check_high_temperature() -> typing.Tuple[bool, Measured]:
    spec = _default_spectrum()
    reference = 2.0 / spec.B
    far = thermo_point(spec, 1000.0)
    near = thermo_point(spec, 100.0)
    measured = {
        "U_over_mu_1000": far.U_bar / far.mu,
        "Cv_1000": far.Cv_bar,
        "Z_gap_1000": relative_gap(far.Z / far.mu**2, reference),
        "Cv_100": near.Cv_bar,
        "U_over_mu_100": near.U_bar / near.mu,
        "Z_gap_100": relative_gap(near.Z / near.mu**2, reference),
    }
    passed = (
        abs(measured["U_over_mu_1000"] - 2.0) <= 0.05
        and abs(measured["Cv_1000"] - 2.0) <= 0.05
        and measured["Z_gap_1000"] <= 0.02
        and abs(measured["Cv_100"] - 2.0) <= 0.05
    )
    return passed, measured


def check_identities() -> typing.Tuple[bool, Measured]:
    spec = _default_spectrum()
    worst_free = worst_entropy = 0.0
    for method in Method:
        for p in thermo_curve(spec, 0.5, 20.0, 200, method):
            worst_free = max(worst_free, abs(p.F_bar - (p.U_bar - p.mu * p.S_bar)))
            worst_entropy = max(
                worst_entropy, abs(p.S_bar - (math.log(p.Z) + p.U_bar / p.mu))
            )

    # Heat capacity against a numerical derivative of the mean energy
    worst_cv = 0.0
    checks = [(Method.EULER_MCLAURIN, mu) for mu in np.linspace(1.0, 50.0, 50)]
    checks += [(Method.DIRECT, mu) for mu in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)]
    for method, mu in checks:
        tol = 1e-14 if method is Method.DIRECT else 1e-10

        def mean_energy(x: float) -> float:
            return thermo_point(spec, x, method, tol).U_bar

        slope = stable_derivative(mean_energy, float(mu), 1e-3 * mu)
        cv = thermo_point(spec, float(mu), method, tol).Cv_bar
        worst_cv = max(worst_cv, relative_gap(cv, slope))

    passed = worst_free <= 1e-10 and worst_entropy <= 1e-10 and worst_cv <= 1e-5
    return passed, {
        "max_free_energy_error": worst_free,
        "max_entropy_error": worst_entropy,
        "max_cv_relative_error": worst_cv,
    }


def check_curve_shapes() -> typing.Tuple[bool, Measured]:
    spec = _default_spectrum()
    measured = {}
    for method in Method:
        curve = thermo_curve(spec, 0.5, 20.0, 200, method)
        measured[f"F_decreasing_{method.value}"] = strictly_monotone(
            [p.F_bar for p in curve], increasing=False
        )
        measured[f"U_increasing_{method.value}"] = strictly_monotone(
            [p.U_bar for p in curve]
        )
    return all(measured.values()), measured


def check_normalization() -> typing.Tuple[bool, Measured]:
    wf = build_wavefunction(TABLE1_PARAMS, QuantumState(1, 0, 3))
    exact = wf.with_log_norm(log_norm_quadrature(wf))
    total = density_integral_simpson(exact)

    gaussian_params = CouplingParams(a_v=0.0, a_s=0.0, b_v=0.0, b_s=2.0, M=1.0)
    gaussian = build_wavefunction(
        gaussian_params, QuantumState(0, 1, 3, KVariant.HALF_QUADRATIC)
    )
    constant_gap = abs(math.exp(gaussian.log_C - log_norm_quadrature(gaussian)) - 1.0)

    rho = deviation_factor(wf)
    rho_simpson = density_integral_simpson(wf)
    passed = (
        abs(total - 1.0) <= 1e-8
        and constant_gap <= 1e-8
        and DEVIATION_FACTOR_BAND[0] < rho < DEVIATION_FACTOR_BAND[1]
        and relative_gap(rho, rho_simpson) <= 1e-8
    )
    return passed, {
        "normalised_integral": total,
        "gaussian_constant_gap": constant_gap,
        "deviation_factor": rho,
        "deviation_factor_simpson": rho_simpson,
    }


def check_ode_limits() -> typing.Tuple[bool, Measured]:
    oscillator = CouplingParams(a_v=0.0, a_s=0.0, b_v=0.0, b_s=2.0, M=0.0)
    level = find_level(make_problem(oscillator, 3, 0, 0, (2.0, 3.0)))
    coulomb = CouplingParams(a_v=0.2, a_s=0.0, b_v=0.0, b_s=0.0, M=1.0)
    coulomb_level = find_level(make_problem(coulomb, 3, 0, 0, (0.96, 0.99)))
    measured = {
        "oscillator_E": level.E,
        "oscillator_error": abs(level.E - oscillator_level(2.0, 0, 0, 3)),
        "oscillator_shift": level.halving_shift,
        "coulomb_E": coulomb_level.E,
        "coulomb_error": abs(coulomb_level.E - kg_coulomb_level(1.0, 0.2, 0, 0)),
        "coulomb_shift": coulomb_level.halving_shift,
    }
    passed = (
        measured["oscillator_error"] <= 1e-6
        and measured["coulomb_error"] <= 1e-6
        and measured["oscillator_shift"] < 1e-8
        and measured["coulomb_shift"] < 1e-8
    )
    return passed, measured


def check_mutation() -> typing.Tuple[bool, Measured]:
    rule = K_RULES[KVariant.TABLE1]
    flipped = rule._replace(angular_sign=-rule.angular_sign)
    result = table1_deviation(flipped)
    detected = result["max_deviation"] > TABLE1_TOLERANCE
    return detected, {"mutated_max_deviation": result["max_deviation"]}


CRITERIA: typing.List[typing.Tuple[int, str, typing.Callable]] = [
    (1, "table1_reproduction", check_table1),
    (2, "vieta_sum", check_vieta),
    (3, "linear_form_identity", check_linear_form),
    (4, "partition_function_oracle", check_partition_oracle),
    (5, "high_temperature_limits", check_high_temperature),
    (6, "thermodynamic_identities", check_identities),
    (7, "curve_shapes", check_curve_shapes),
    (8, "normalization", check_normalization),
    (9, "ode_analytic_limits", check_ode_limits),
    (10, "mutation_sensitivity", check_mutation),
]


def run_criterion(number: int, name: str, check: typing.Callable) -> CriterionResult:
    try:
        passed, measured = check()
    except ComputationError as error:
        return CriterionResult(number, name, False, {}, f"{error.reason}: {error}")
    except (ArithmeticError, ValueError) as error:
        message = f"{type(error).__name__}: {error}"
        return CriterionResult(number, name, False, {}, message)
    return CriterionResult(number, name, bool(passed), measured)


def printed_closed_form_gap(mu: float = 5.0) -> float:
    """Relative gap between the published closed form and the direct sum."""
    alpha, delta = printed_identifications(TABLE1_PARAMS, 3, 0)
    direct = partition_direct(_default_spectrum(), mu)
    return relative_gap(partition_printed(alpha, delta, mu), direct)


def validate_suite(config: typing.Any = None, out: typing.Optional[str] = None) -> int:
    """Runs every criterion, prints one line each and returns the exit status.

    Arguments:
        config: ``RunConfig`` (Optional) Supplies ``out`` when given.
        out: ``str`` (Optional) Path of the JSON metrics report.
    Returns:
        status: ``int`` 0 if every criterion passed, else 1.
    """
    if out is None and config is not None:
        out = config.out

    results = []
    for number, name, check in CRITERIA:
        result = run_criterion(number, name, check)
        print(result.line())
        results.append(result)

    # Published closed form, reported but not gated
    printed_gap = printed_closed_form_gap()
    informational = {"printed_closed_form_gap_mu_5": printed_gap}
    print(f"[INFO] printed closed form vs direct sum at mu=5: {printed_gap:.6g}")

    failed = sum(not r.passed for r in results)
    engine = inflect.engine()
    print(
        f"{failed} of {len(results)} {engine.plural('criterion', len(results))} failed"
    )

    metrics = {
        "passed": failed == 0,
        "criteria": [dataclasses.asdict(r) for r in results],
        "informational": informational,
    }
    if out:
        with open(out, "w") as f:
            f.write(json.dumps(finite_or_none(metrics), indent=4))
    return 0 if failed == 0 else 1


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "-o",
        "--out",
        required=False,
        help="File to which we write the metrics. If not provided, we only print.",
    )
    args = parser.parse_args()
    raise SystemExit(validate_suite(out=args.out))


if __name__ == "__main__":
    main()
