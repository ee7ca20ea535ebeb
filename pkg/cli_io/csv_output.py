"""CSV and JSON Lines writers for subcommand results."""
import contextlib
import csv
import enum
import math
import sys
import typing

import jsonlines

from cli_io.errors import IoError

SCHEMAS: typing.Dict[str, typing.List[str]] = {
    "spectrum": ["D", "n", "l", "variant", "k", "E_plus", "E_minus", "status"],
    "thermo": ["mu", "Z_direct", "Z_em", "F_bar", "U_bar", "S_bar", "Cv_bar"],
    "wavefunction": ["r", "R_paper", "R_exact"],
    "ode": ["D", "l", "nodes", "E_numeric", "residual", "h"],
}

SIGNIFICANT_DIGITS = 12


def format_field(value: typing.Any) -> str:
    """Integers verbatim, floats with 12 significant digits, enums by tag."""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


@contextlib.contextmanager
def _open_output(path: typing.Optional[str]):
    if path is None:
        yield sys.stdout
        return
    try:
        handle = open(path, "w", encoding="utf-8", newline="")
    except OSError as error:
        raise IoError(f"cannot write {path}: {error.strerror}")
    with handle:
        yield handle


def write_csv(
    rows: typing.Iterable[typing.Sequence[typing.Any]],
    schema: typing.Sequence[str],
    path: typing.Optional[str] = None,
) -> int:
    """Writes a header and one line per row; returns the number of data rows.

    Arguments:
        rows: ``Iterable[Sequence]`` Rows in schema order.
        schema: ``Sequence[str]`` Column names.
        path: ``str`` (Optional) Output file, stdout when omitted.
    Returns:
        count: ``int`` Rows written.
    """
    count = 0
    with _open_output(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(schema)
        for row in rows:
            if len(row) != len(schema):
                raise ValueError(f"row {row!r} does not match columns {list(schema)}")
            writer.writerow([format_field(value) for value in row])
            count += 1
    return count


def write_jsonl(
    records: typing.Iterable[dict], path: typing.Optional[str] = None
) -> None:
    """Writes one JSON object per line to path, or to stderr."""
    if path is None:
        with jsonlines.Writer(sys.stderr) as writer:
            writer.write_all(records)
        return
    try:
        with jsonlines.open(path, mode="w") as writer:
            writer.write_all(records)
    except OSError as error:
        raise IoError(f"cannot write {path}: {error.strerror}")
