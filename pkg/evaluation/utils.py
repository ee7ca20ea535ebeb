"""Helper functions for the acceptance checks."""
import math
import os
import typing

import ujson as json

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
TABLE1_FILE = os.path.join(DATA_DIR, "table1.json")


def load_table1(
    path: str = TABLE1_FILE,
) -> typing.Dict[typing.Tuple[int, int, int], typing.Tuple[float, float]]:
    """Loads the published energy table keyed by (n, l, D).

    Arguments:
        path: ``str`` Path to a JSON list of {n, l, D, e_plus, e_minus} rows.
    Returns:
        table: ``dict`` Mapping from (n, l, D) to (e_plus, e_minus).
    """
    with open(path) as f:
        rows = json.load(f)
    return {
        (row["n"], row["l"], row["D"]): (row["e_plus"], row["e_minus"]) for row in rows
    }


def relative_gap(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def strictly_monotone(values: typing.Sequence[float], increasing: bool = True) -> bool:
    pairs = zip(values[:-1], values[1:])
    if increasing:
        return all(b > a for a, b in pairs)
    return all(b < a for a, b in pairs)


def stable_derivative(
    fn: typing.Callable[[float], float],
    x: float,
    step: float,
    rel_tol: float = 1e-8,
    max_halvings: int = 12,
) -> float:
    """Central difference of fn at x, halving the step until two estimates agree."""
    previous = (fn(x + step) - fn(x - step)) / (2.0 * step)
    for _ in range(max_halvings):
        step /= 2.0
        current = (fn(x + step) - fn(x - step)) / (2.0 * step)
        if abs(current - previous) <= rel_tol * abs(current):
            return current
        previous = current
    return previous


def finite_or_none(value: typing.Any) -> typing.Any:
    """Replaces non-finite floats so the report stays valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_or_none(v) for v in value]
    return value
