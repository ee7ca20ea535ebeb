"""Coupling constants and quantum numbers of the KG-Cornell problem.

Natural units are used throughout (hbar = c = 1): energies and masses share a
unit, the linear strengths b_v and b_s carry mass squared, and lengths are
inverse masses.
"""
import dataclasses
import enum
import math
import numbers
import typing

from spectral_core.errors import InvalidCouplings, InvalidQuantumState


class KVariant(enum.Enum):
    """Which closed form of the near-origin exponent k to use.

    ``TABLE1`` reproduces the published energy table, ``PRINTED_EQ27`` is the
    exponent formula exactly as printed and ``HALF_QUADRATIC`` is the exact
    positive root of the parametric condition k(k-1) + k(D-1) - l(l+D-2) +
    (a_v^2 - a_s^2) = 0.
    """

    TABLE1 = "table1"
    PRINTED_EQ27 = "eq27"
    HALF_QUADRATIC = "half"

    @classmethod
    def from_tag(cls, tag: str) -> "KVariant":
        for variant in cls:
            if variant.value == tag:
                return variant
        raise ValueError(
            f"unknown variant {tag!r}, expected one of {[v.value for v in cls]}"
        )


class Branch(enum.Enum):
    """Sign of the energy root."""

    PLUS = "plus"
    MINUS = "minus"


@dataclasses.dataclass(frozen=True)
class CouplingParams:
    """The four Cornell couplings plus the rest mass.

    V(r) = -a_v / r + b_v r is the time-like vector part and
    S(r) = -a_s / r + b_s r the scalar part.
    """

    a_v: float
    a_s: float
    b_v: float
    b_s: float
    M: float

    def __post_init__(self):
        for name in ("a_v", "a_s", "b_v", "b_s", "M"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise InvalidCouplings(f"{name} must be a finite real, got {value!r}")
        if self.M < 0:
            raise InvalidCouplings(f"M must be >= 0, got {self.M}", self.M)

    def validate_closed_form(self) -> None:
        """Raises unless b_s > 0 and b_s >= |b_v| (beta must be real)."""
        if self.b_s <= 0:
            raise InvalidCouplings(f"b_s must be > 0, got {self.b_s}", self.b_s)
        if self.b_s < abs(self.b_v):
            raise InvalidCouplings(
                f"b_s must be >= |b_v|, got b_s={self.b_s}, b_v={self.b_v}", self.b_s
            )

    @property
    def beta(self) -> float:
        """sqrt(b_s^2 - b_v^2), the Gaussian decay rate of R(r)."""
        self.validate_closed_form()
        return math.sqrt((self.b_s - self.b_v) * (self.b_s + self.b_v))

    @property
    def vector_ratio(self) -> float:
        """b_v / b_s."""
        self.validate_closed_form()
        return self.b_v / self.b_s

    @property
    def coulomb_difference(self) -> float:
        """a_v^2 - a_s^2."""
        return self.a_v**2 - self.a_s**2

    def epsilon_squared(self, energy: float) -> float:
        """M^2 - E^2 for a given energy."""
        return self.M**2 - energy**2


TABLE1_PARAMS = CouplingParams(a_v=0.2, a_s=6.0, b_v=0.002, b_s=2.0, M=1.0)


def _as_count(name: str, value: typing.Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidQuantumState(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidQuantumState(f"{name} must be >= {minimum}, got {value}", value)
    return int(value)


@dataclasses.dataclass(frozen=True)
class QuantumState:
    """Radial index n, orbital index l and dimension D, plus the k variant.

    A one-dimensional problem has no orbital motion, so D = 1 requires l = 0.
    The published table nevertheless lists D = 1 cells with l > 0 (evaluated
    with l(l-1) in place of the angular eigenvalue); such cells are built
    with ``formal=True`` and are accepted only by the energy formulas.
    """

    n: int
    l: int  # noqa: E741
    D: int
    variant: KVariant = KVariant.TABLE1
    formal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n", _as_count("n", self.n, 0))
        object.__setattr__(self, "l", _as_count("l", self.l, 0))
        object.__setattr__(self, "D", _as_count("D", self.D, 1))
        if not isinstance(self.variant, KVariant):
            raise InvalidQuantumState(f"unknown variant {self.variant!r}")
        if self.D == 1 and self.l > 0 and not self.formal:
            raise InvalidQuantumState(f"D = 1 requires l = 0, got l = {self.l}", self.l)

    @property
    def angular_eigenvalue(self) -> int:
        """l(l + D - 2)."""
        return self.l * (self.l + self.D - 2)
