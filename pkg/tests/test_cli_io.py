import argparse
import math

import jsonlines
import pytest

import kg_cornell
from cli_io.config import (
    parse_bracket,
    parse_config,
    parse_dims,
    parse_int_list,
    parse_method,
    parse_variant,
    read_config_file,
)
from cli_io.csv_output import SCHEMAS, format_field, write_csv, write_jsonl
from cli_io.errors import ConfigParseError, IoError, UsageError
from spectral_core.params import TABLE1_PARAMS, KVariant
from thermodynamics.quantities import Method

OSCILLATOR_FLAGS = ["--M", "0", "--av", "0", "--as", "0", "--bv", "0", "--bs", "2"]


def test_defaults():
    config = parse_config(["thermo"])
    assert config.params == TABLE1_PARAMS
    assert config.dims == (3,)
    assert config.D == 3
    assert config.method is Method.EULER_MCLAURIN
    assert config.variant is KVariant.TABLE1
    assert config.nodes == (0, 1, 2)
    assert config.out is None
    assert parse_config(["spectrum"]).dims == (1, 2, 3, 4, 5, 6)


def test_flags_override_defaults():
    config = parse_config(
        ["ode", "--bs", "3", "--nodes", "1,2", "--bracket", "1,4", "--variant", "half"]
    )
    assert config.b_s == 3.0
    assert config.nodes == (1, 2)
    assert config.bracket == (1.0, 4.0)
    assert config.variant is KVariant.HALF_QUADRATIC


def test_validation_names_the_flag():
    with pytest.raises(UsageError, match="--bs"):
        parse_config(["spectrum", "--bs", "1", "--bv", "2"])
    with pytest.raises(UsageError, match="--dims"):
        parse_config(["thermo", "--dims", "1..3"])
    with pytest.raises(UsageError, match="--mu-max"):
        parse_config(["thermo", "--mu-min", "5", "--mu-max", "2"])
    with pytest.raises(UsageError, match="--bracket"):
        parse_config(["ode", "--bracket", "-1,1"])
    with pytest.raises(UsageError):
        parse_config(["bogus"])
    with pytest.raises(UsageError):
        parse_config(["spectrum", "--nmax", "three"])


def test_config_file_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# couplings\nbs = 3\nav = 0.5  # vector\nmu_min = 1.5\n")
    config = parse_config(["thermo", "--config", str(path), "--bs", "4"])
    assert config.b_s == 4.0
    assert config.a_v == 0.5
    assert config.mu_min == 1.5
    assert config.config == str(path)

    from_argument = parse_config(["thermo"], config_path=str(path))
    assert from_argument.b_s == 3.0


def test_config_file_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("# comment\nbs = 2\nfoo = 1\n")
    with pytest.raises(ConfigParseError, match="line 3") as info:
        read_config_file(str(path))
    assert info.value.line == 3

    path.write_text("bs = two\n")
    with pytest.raises(ConfigParseError, match="line 1"):
        read_config_file(str(path))

    path.write_text("\nbs 2\n")
    with pytest.raises(ConfigParseError, match="line 2"):
        read_config_file(str(path))

    with pytest.raises(ConfigParseError):
        read_config_file(str(tmp_path / "missing.cfg"))


def test_parse_helpers():
    assert parse_dims("1..6") == [1, 2, 3, 4, 5, 6]
    assert parse_dims("2,4") == [2, 4]
    assert parse_dims("3") == [3]
    assert parse_int_list("0,1,2") == [0, 1, 2]
    assert parse_bracket("1.5,2") == (1.5, 2.0)
    assert parse_variant("eq27") is KVariant.PRINTED_EQ27
    assert parse_method("direct") is Method.DIRECT
    for parser, text in [
        (parse_dims, "x"),
        (parse_dims, "4..1"),
        (parse_int_list, "1,a"),
        (parse_bracket, "1"),
        (parse_variant, "other"),
        (parse_method, "exact"),
    ]:
        with pytest.raises(argparse.ArgumentTypeError):
            parser(text)


def test_format_field():
    assert format_field(3) == "3"
    assert format_field(1.0 / 3.0) == "0.333333333333"
    assert format_field(math.nan) == "nan"
    assert format_field(KVariant.HALF_QUADRATIC) == "half"
    assert format_field(True) == "true"
    assert format_field("ok") == "ok"


def test_write_csv(tmp_path):
    path = tmp_path / "rows.csv"
    assert write_csv([], ["a", "b"], str(path)) == 0
    assert path.read_bytes() == b"a,b\n"

    rows = [
        (1, 0.5, KVariant.TABLE1, math.nan),
        (2, 2.0, KVariant.HALF_QUADRATIC, 1e-20),
    ]
    assert write_csv(rows, ["i", "x", "variant", "y"], str(path)) == 2
    assert path.read_bytes() == b"i,x,variant,y\n1,0.5,table1,nan\n2,2,half,1e-20\n"

    with pytest.raises(ValueError):
        write_csv([(1,)], ["a", "b"], str(path))
    with pytest.raises(IoError):
        write_csv([], ["a"], str(tmp_path / "missing" / "rows.csv"))


def test_write_csv_to_stdout(capsys):
    write_csv([(1, 2)], ["a", "b"])
    assert capsys.readouterr().out == "a,b\n1,2\n"


def test_write_jsonl(tmp_path, capsys):
    path = tmp_path / "records.jsonl"
    write_jsonl([{"a": 1}, {"a": None}], str(path))
    with jsonlines.open(path) as reader:
        assert list(reader) == [{"a": 1}, {"a": None}]
    write_jsonl([{"b": 2}])
    assert capsys.readouterr().err.strip() == '{"b": 2}'
    with pytest.raises(IoError):
        write_jsonl([{"a": 1}], str(tmp_path / "missing" / "records.jsonl"))


def test_spectrum_command(tmp_path, capsys):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert kg_cornell.main(["spectrum", "--out", str(first)]) == 0
    assert kg_cornell.main(["spectrum", "--out", str(second)]) == 0
    assert "Wrote 90 rows" in capsys.readouterr().out

    lines = first.read_text(encoding="utf-8").split("\n")
    assert lines[0] == ",".join(SCHEMAS["spectrum"])
    assert len(lines) == 92 and lines[-1] == ""
    assert b"\r" not in first.read_bytes()
    assert first.read_bytes() == second.read_bytes()


def test_usage_error_exit_status(capsys):
    assert kg_cornell.main(["spectrum", "--bs", "1", "--bv", "2"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error[UsageError]: argument --bs")
    assert len(err.strip().splitlines()) == 1


def test_computation_error_exit_status(capsys):
    assert kg_cornell.main(["wavefunction", "--av", "1", "--as", "1"]) == 1
    assert capsys.readouterr().err.startswith("error[NonPositiveExponent]:")


def test_stray_numeric_error_exit_status(monkeypatch, capsys):
    def failing(config):
        raise ValueError("math domain error")

    monkeypatch.setitem(kg_cornell.RUNNERS, "spectrum", failing)
    assert kg_cornell.main(["spectrum"]) == 1
    err = capsys.readouterr().err
    assert err == "error[ValueError]: math domain error\n"


def test_thermo_command(tmp_path):
    path = tmp_path / "thermo.csv"
    assert kg_cornell.main(["thermo", "--points", "5", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(SCHEMAS["thermo"])
    assert len(lines) == 6
    assert float(lines[1].split(",")[0]) == 0.5
    assert float(lines[-1].split(",")[0]) == 20.0


def test_wavefunction_command(tmp_path, capsys):
    path = tmp_path / "wf.csv"
    assert kg_cornell.main(["wavefunction", "--samples", "20", "--out", str(path)]) == 0
    assert len(path.read_text().splitlines()) == 21
    err = capsys.readouterr().err
    assert err.startswith("deviation factor rho = ")
    rho = float(err.split("=")[1])
    assert 1.5e-7 < rho < 1.9e-7


def test_ode_command(tmp_path):
    path = tmp_path / "ode.csv"
    argv = ["ode", *OSCILLATOR_FLAGS, "--nodes", "0", "--bracket", "2,3"]
    argv += ["--variant", "half", "--out", str(path)]
    assert kg_cornell.main(argv) == 0

    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(SCHEMAS["ode"])
    assert len(lines) == 2
    assert float(lines[1].split(",")[3]) == pytest.approx(math.sqrt(6.0), abs=1e-6)

    with jsonlines.open(f"{path}.compare.jsonl") as reader:
        records = list(reader)
    assert len(records) == 1
    assert records[0]["status"] == "ok"
    assert records[0]["variant"] == "half"
    assert records[0]["relative_gap"] < 1e-6
    assert records[0]["converged"] is True
