#!/usr/bin/python3
"""Command-line front end: spectrum, thermo, wavefunction, ode and validate.

Every failure ends in a single stderr line `error[<Reason>]: <message>` with
exit status 2 for usage and config errors and 1 for computation failures.
"""
import math
import sys
import typing

import inflect

from cli_io.config import RunConfig, parse_config
from cli_io.csv_output import SCHEMAS, write_csv, write_jsonl
from cli_io.errors import UsageError
from evaluation.validate_suite import validate_suite
from ode_verifier.levels import compare_with_closed_form
from radial_wavefunctions.normalization import deviation_factor
from radial_wavefunctions.wavefunction import build_wavefunction, sample_wavefunction
from spectral_core.energies import linear_form
from spectral_core.errors import ComputationError
from spectral_core.params import QuantumState
from spectral_core.table import spectrum_table
from thermodynamics.errors import SeriesBreakdown
from thermodynamics.partition import partition_direct, partition_em
from thermodynamics.quantities import thermo_curve

_inflect = inflect.engine()


def _report(count: int, path: typing.Optional[str]) -> None:
    if path:
        print(f"Wrote {count} {_inflect.plural('row', count)} to {path}")


def run_spectrum(config: RunConfig) -> int:
    rows = spectrum_table(
        config.params, config.dims, config.nmax, config.variant, config.progress
    )
    count = write_csv(
        (
            (r.D, r.n, r.l, r.variant, r.k, r.e_plus, r.e_minus, r.status)
            for r in rows
        ),
        SCHEMAS["spectrum"],
        config.out,
    )
    _report(count, config.out)
    return 0


def run_thermo(config: RunConfig) -> int:
    spec = linear_form(config.params, config.D, config.l, config.variant)
    curve = thermo_curve(
        spec,
        config.mu_min,
        config.mu_max,
        config.points,
        config.method,
        progress=config.progress,
    )
    rows = []
    for p in curve:
        try:
            z_em = partition_em(spec, p.mu)
        except SeriesBreakdown:
            z_em = math.nan
        z_direct = partition_direct(spec, p.mu)
        rows.append((p.mu, z_direct, z_em, p.F_bar, p.U_bar, p.S_bar, p.Cv_bar))
    _report(write_csv(rows, SCHEMAS["thermo"], config.out), config.out)
    return 0


def run_wavefunction(config: RunConfig) -> int:
    state = QuantumState(n=config.n, l=config.l, D=config.D, variant=config.variant)
    wf = build_wavefunction(config.params, state)
    samples = sample_wavefunction(wf, 0.0, config.rmax, config.samples)
    rows = zip(samples.r.tolist(), samples.R_paper.tolist(), samples.R_exact.tolist())
    _report(write_csv(rows, SCHEMAS["wavefunction"], config.out), config.out)
    print(f"deviation factor rho = {deviation_factor(wf):.9g}", file=sys.stderr)
    return 0


def run_ode(config: RunConfig) -> int:
    comparisons = compare_with_closed_form(
        config.params,
        config.D,
        config.l,
        list(config.nodes),
        config.variant,
        bracket=config.bracket,
        r_max=config.rmax,
        progress=config.progress,
    )
    rows = [
        (
            config.D,
            config.l,
            c.level.nodes,
            c.level.E,
            c.level.mismatch_residual,
            c.level.grid_h,
        )
        for c in comparisons
    ]
    _report(write_csv(rows, SCHEMAS["ode"], config.out), config.out)
    write_jsonl(
        (
            {
                "nodes": c.nodes,
                "variant": c.variant.value,
                "E_numeric": c.level.E,
                "E_closed": None if math.isnan(c.E_closed) else c.E_closed,
                "relative_gap": None if math.isnan(c.relative_gap) else c.relative_gap,
                "converged": c.level.converged,
                "halving_shift": c.level.halving_shift,
                "status": c.status,
            }
            for c in comparisons
        ),
        f"{config.out}.compare.jsonl" if config.out else None,
    )
    return 0


def run_validate(config: RunConfig) -> int:
    return validate_suite(config)


RUNNERS: typing.Dict[str, typing.Callable[[RunConfig], int]] = {
    "spectrum": run_spectrum,
    "thermo": run_thermo,
    "wavefunction": run_wavefunction,
    "ode": run_ode,
    "validate": run_validate,
}


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        return RUNNERS[config.command](config)
    except UsageError as error:
        print(f"error[{error.reason}]: {error}", file=sys.stderr)
        return 2
    except ComputationError as error:
        print(f"error[{error.reason}]: {error}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError) as error:
        print(f"error[{type(error).__name__}]: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
