"""Command-line flags, `key = value` config files and their merge into a RunConfig.

Precedence is built-in defaults < config file < explicit flags.
"""
import argparse
import dataclasses
import typing

from cli_io.errors import ConfigParseError, UsageError
from spectral_core.errors import ComputationError
from spectral_core.params import CouplingParams, KVariant
from thermodynamics.quantities import Method

COMMANDS = ("spectrum", "thermo", "wavefunction", "ode", "validate")
CLOSED_FORM_COMMANDS = ("spectrum", "thermo", "wavefunction")


def parse_dims(text: str) -> typing.List[int]:
    """Inclusive range `A..B`, a list `A,B,C` or a single dimension."""
    try:
        if ".." in text:
            start, stop = text.split("..")
            dims = list(range(int(start), int(stop) + 1))
        else:
            dims = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or integers, got {text!r}")
    if not dims:
        raise argparse.ArgumentTypeError(f"empty dimension range {text!r}")
    return dims


def parse_int_list(text: str) -> typing.List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def parse_bracket(text: str) -> typing.Tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return lo, hi


def parse_variant(text: str) -> KVariant:
    try:
        return KVariant.from_tag(text.strip())
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error))


def parse_method(text: str) -> Method:
    try:
        return Method.from_tag(text.strip())
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error))


class Option(typing.NamedTuple):
    flag: str
    dest: str
    convert: typing.Callable[[str], typing.Any]
    help: str


OPTIONS = [
    Option("--M", "M", float, "Rest mass M."),
    Option("--av", "a_v", float, "Vector Coulomb strength a_v."),
    Option("--as", "a_s", float, "Scalar Coulomb strength a_s."),
    Option("--bv", "b_v", float, "Vector linear strength b_v."),
    Option("--bs", "b_s", float, "Scalar linear strength b_s."),
    Option("--dims", "dims", parse_dims, "Dimensions, e.g. 1..6 or 3."),
    Option("--nmax", "nmax", int, "Largest radial index of the energy table."),
    Option("--variant", "variant", parse_variant, "Exponent rule: table1, eq27, half."),
    Option("--l", "l", int, "Orbital index."),
    Option("--mu-min", "mu_min", float, "Smallest reduced temperature."),
    Option("--mu-max", "mu_max", float, "Largest reduced temperature."),
    Option("--points", "points", int, "Number of temperatures."),
    Option("--method", "method", parse_method, "Thermal method: direct or em."),
    Option("--n", "n", int, "Radial index of the wave function."),
    Option("--rmax", "rmax", float, "Outer radius (wave function samples, ODE grid)."),
    Option("--samples", "samples", int, "Number of wave function samples."),
    Option("--nodes", "nodes", parse_int_list, "Node counts to solve for, e.g. 0,1,2."),
    Option("--bracket", "bracket", parse_bracket, "Energy bracket LO,HI for the ODE."),
    Option("--out", "out", str, "Output path; stdout when omitted."),
]

FLAGS_BY_DEST = {option.dest: option.flag for option in OPTIONS}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    M: float = 1.0
    a_v: float = 0.2
    a_s: float = 6.0
    b_v: float = 0.002
    b_s: float = 2.0
    dims: typing.Tuple[int, ...] = (3,)
    nmax: int = 5
    variant: KVariant = KVariant.TABLE1
    l: int = 0  # noqa: E741
    mu_min: float = 0.5
    mu_max: float = 20.0
    points: int = 200
    method: Method = Method.EULER_MCLAURIN
    n: int = 1
    rmax: typing.Optional[float] = None
    samples: int = 200
    nodes: typing.Tuple[int, ...] = (0, 1, 2)
    bracket: typing.Optional[typing.Tuple[float, float]] = None
    out: typing.Optional[str] = None
    config: typing.Optional[str] = None
    progress: bool = False

    @property
    def params(self) -> CouplingParams:
        return CouplingParams(
            a_v=self.a_v, a_s=self.a_s, b_v=self.b_v, b_s=self.b_s, M=self.M
        )

    @property
    def D(self) -> int:
        return self.dims[0]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    for option in OPTIONS:
        common.add_argument(
            option.flag, dest=option.dest, type=option.convert, help=option.help
        )
    common.add_argument("--config", dest="config", help="Path to a key = value file.")
    common.add_argument(
        "--progress", dest="progress", action="store_true", help="Show progress bars."
    )

    parser = _Parser(
        prog="kg_cornell.py",
        description="Spectra, wave functions and thermodynamics of the "
        "D-dimensional Klein-Gordon equation with Cornell potentials.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common])
    return parser


def _config_key(key: str) -> str:
    key = key.strip().replace("_", "-")
    return "--" + key


def read_config_file(path: str) -> typing.Dict[str, typing.Any]:
    """Reads `key = value` lines; `#` starts a comment.

    Keys are flag names without the leading dashes (`bs`, `mu-min`, `mu_min`).
    """
    options = {option.flag: option for option in OPTIONS}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as error:
        raise ConfigParseError(f"cannot read {path}: {error.strerror}", 0)

    values = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected key = value, got {raw.strip()!r}", number)
        key, value = (part.strip() for part in line.split("=", 1))
        option = options.get(_config_key(key))
        if option is None:
            raise ConfigParseError(f"unknown key {key!r}", number)
        try:
            values[option.dest] = option.convert(value)
        except (ValueError, argparse.ArgumentTypeError) as error:
            raise ConfigParseError(f"bad value for {key!r}: {error}", number)
    return values


def _require(condition: bool, dest: str, message: str) -> None:
    if not condition:
        raise UsageError(f"argument {FLAGS_BY_DEST.get(dest, dest)}: {message}")


def validate_config(config: RunConfig) -> None:
    """Checks every field against the preconditions of the command it feeds."""
    if config.command == "validate":
        return
    try:
        params = config.params
    except ComputationError as error:
        raise UsageError(f"argument --M: {error}")
    _require(
        params.b_s >= abs(params.b_v),
        "b_s",
        f"b_s = {params.b_s} must be >= |b_v| = {abs(params.b_v)}",
    )
    if config.command in CLOSED_FORM_COMMANDS:
        _require(params.b_s > 0, "b_s", "the closed form needs b_s > 0")
    _require(all(D >= 1 for D in config.dims), "dims", "dimensions must be >= 1")
    if config.command != "spectrum":
        _require(len(config.dims) == 1, "dims", f"{config.command} takes one dimension")
    if config.command in ("wavefunction", "ode"):
        _require(config.D > 1 or config.l == 0, "l", "D = 1 requires l = 0")
    _require(config.nmax >= 1, "nmax", "must be >= 1")
    _require(config.l >= 0, "l", "must be >= 0")
    _require(config.n >= 0, "n", "must be >= 0")
    _require(0 < config.mu_min, "mu_min", "must be > 0")
    _require(config.mu_min < config.mu_max, "mu_max", "must exceed --mu-min")
    _require(config.points >= 2, "points", "must be >= 2")
    _require(config.samples >= 2, "samples", "must be >= 2")
    _require(config.rmax is None or config.rmax > 0, "rmax", "must be > 0")
    _require(
        len(config.nodes) > 0 and all(k >= 0 for k in config.nodes),
        "nodes",
        "node counts must be >= 0",
    )
    if config.bracket is not None:
        lo, hi = config.bracket
        _require(lo < hi, "bracket", "LO must be below HI")
        _require(not lo < 0 < hi, "bracket", "the bracket must not straddle zero")


def parse_config(
    argv: typing.Sequence[str], config_path: typing.Optional[str] = None
) -> RunConfig:
    """Resolves argv (and an optional config file) into a validated RunConfig.

    Arguments:
        argv: ``Sequence[str]`` Subcommand followed by flags.
        config_path: ``str`` (Optional) Config file; ``--config`` in argv wins.
    Returns:
        config: ``RunConfig`` fully resolved.
    """
    args = vars(build_parser().parse_args(list(argv)))
    command = args.pop("command")
    path = args.get("config", config_path)

    settings: typing.Dict[str, typing.Any] = {}
    if command == "spectrum":
        settings["dims"] = [1, 2, 3, 4, 5, 6]
    if path is not None:
        settings.update(read_config_file(path))
        settings["config"] = path
    settings.update(args)

    for key in ("dims", "nodes"):
        if key in settings:
            settings[key] = tuple(settings[key])
    config = RunConfig(command=command, **settings)
    validate_config(config)
    return config
