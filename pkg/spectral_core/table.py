"""Energy table over a (n, l, D) grid."""
import dataclasses
import math
import typing

import tqdm

from spectral_core.energies import energy_pair
from spectral_core.errors import InvalidQuantumState, NegativeDiscriminant
from spectral_core.params import CouplingParams, KVariant, QuantumState


@dataclasses.dataclass(frozen=True)
class TableRow:
    n: int
    l: int  # noqa: E741
    D: int
    variant: KVariant
    k: float
    e_plus: float
    e_minus: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def grid_cells(
    D_set: typing.Iterable[int], n_max: int
) -> typing.List[typing.Tuple[int, int, int]]:
    """(n, l, D) for n = 1..n_max, l = 0..n-1, D in D_set, sorted lexicographically."""
    dims = sorted(set(D_set))
    return [(n, l, D) for n in range(1, n_max + 1) for l in range(n) for D in dims]


def spectrum_table(
    params: CouplingParams,
    D_set: typing.Iterable[int],
    n_max: int,
    variant: KVariant = KVariant.TABLE1,
    progress: bool = False,
) -> typing.List[TableRow]:
    """Evaluates both energy roots for every cell of the grid.

    Cells whose exponent or energy is complex are kept with NaN values and a
    status naming the failure, so one bad cell never hides the others.

    Arguments:
        params: ``CouplingParams`` Couplings valid for the closed form.
        D_set: ``Iterable[int]`` Dimensions, each >= 1.
        n_max: ``int`` Largest radial index, >= 1.
        variant: ``KVariant`` Exponent rule.
        progress: ``bool`` Show a tqdm bar.
    Returns:
        rows: ``List[TableRow]`` sorted by (n, l, D).
    """
    params.validate_closed_form()
    if n_max < 1:
        raise InvalidQuantumState(f"n_max must be >= 1, got {n_max}", n_max)
    rows = []
    for n, l, D in tqdm.tqdm(
        grid_cells(D_set, n_max), desc="Evaluating energy table", disable=not progress
    ):
        state = QuantumState(n=n, l=l, D=D, variant=variant, formal=(D == 1 and l > 0))
        try:
            pair = energy_pair(params, state)
        except NegativeDiscriminant as error:
            rows.append(
                TableRow(n, l, D, variant, math.nan, math.nan, math.nan, error.reason)
            )
            continue
        rows.append(TableRow(n, l, D, variant, pair.k, pair.e_plus, pair.e_minus))
    return rows
