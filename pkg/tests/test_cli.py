import json

import pytest

from cokernel_toolkit.cli import RunConfig, build_parser, main
from cokernel_toolkit.toolkit.exact_arith import Interval, json_value, parse_json_value, render_value
from cokernel_toolkit.toolkit.partitions import Partition


@pytest.fixture(autouse=True)
def _env(clean_env):
    return clean_env


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------------------------------------------
# Consultas exactas
# ------------------------------------------------------------------------------------------------
@pytest.mark.parametrize("measure, partition, expected", [
    ("general:p=2,u=1,d=1", "[]", "1/2\n"),
    ("general:p=2,u=1,d=2", "[2]", "9/64\n"),
    ("sym:p=2,n=1", "[3]", "1/16\n"),
])
def test_pmf(capsys, measure, partition, expected):
    assert run(capsys, "pmf", "--measure", measure, "--partition", partition)[:2] == (0, expected)


def test_pmf_decimal(capsys):
    code, out, _ = run(capsys, "pmf", "--measure", "sym:p=2,n=1", "--partition", "[3]", "--decimal")
    assert (code, out) == (0, "0.0625\n")


def test_pmf_json(capsys):
    code, out, _ = run(capsys, "pmf", "--measure", "general:p=2,u=1,d=1", "--partition", "[1]", "--format", "json")
    assert code == 0
    assert json.loads(out) == {'measure': 'general:p=2,u=1,d=1', 'partition': '[1]', 'pmf': '1/4'}


def test_pmf_infinite_measure_prints_interval(capsys):
    code, out, _ = run(capsys, "pmf", "--measure", "syminf:p=2", "--partition", "[]")
    assert code == 0
    assert out.startswith("[") and out.endswith("]\n")


@pytest.mark.parametrize("argv", [
    ("pmf", "--measure", "general:p=2,u=1,d=1", "--partition", "[2,3]"),
    ("pmf", "--measure", "general:p=2,u=3,d=1", "--partition", "[1]"),
    ("pmf", "--measure", "general:p=2,u=1", "--partition", "[1]"),
])
def test_invalid_input_exits_with_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "[error]" in err


def test_marginals(capsys):
    assert run(capsys, "marginal", "--measure", "general:p=2,u=1,d=1", "--size", "1")[:2] == (0, "1/4\n")
    assert run(capsys, "marginal", "--measure", "general:p=2,u=1,d=1", "--parts", "0")[:2] == (0, "1/2\n")
    assert run(capsys, "marginal", "--measure", "general:p=2,u=1,d=2", "--size", "2")[:2] == (0, "21/128\n")
    joint = run(capsys, "marginal", "--measure", "general:p=2,u=1,d=2", "--size", "2", "--parts", "3")
    assert joint[:2] == (0, "0\n")


@pytest.mark.parametrize("argv", [
    ("marginal", "--measure", "general:p=2,u=1,d=1"),
    ("marginal", "--measure", "sym:p=2,n=2", "--size", "1"),
    ("marginal", "--measure", "general:p=2,u=1,d=inf", "--size", "1", "--parts", "1"),
    ("marginal", "--measure", "general:p=2,u=1,d=1", "--size", "-1"),
])
def test_marginal_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_moments_and_torsion(capsys):
    assert run(capsys, "moment", "--measure", "general:p=2,u=1,d=1", "--mu", "[]")[:2] == (0, "1\n")
    assert run(capsys, "moment", "--measure", "general:p=2,u=1,d=1", "--mu", "[1]")[:2] == (0, "1/2\n")
    assert run(capsys, "torsion", "--measure", "general:p=2,u=1,d=1", "--ell", "1")[:2] == (0, "3/2\n")


def test_truncated_moment(capsys):
    code, out, _ = run(capsys, "moment", "--measure", "general:p=2,u=1,d=1", "--mu", "[1]",
                       "--mode", "truncated", "--max-size", "6", "--format", "json")
    document = json.loads(out)
    assert code == 0
    assert document['mode'] == 'truncated'
    assert document['max_size'] == 6
    assert set(document) >= {'value', 'tail_bound'}


def test_torsion_json_reports_exact_order(capsys):
    code, out, _ = run(capsys, "torsion", "--measure", "general:p=2,u=1,d=1", "--ell", "1", "--format", "json")
    document = json.loads(out)
    assert code == 0
    assert (document['expectation'], document['exact_order_expectation']) == ("3/2", "1/2")


# ------------------------------------------------------------------------------------------------
# JSON exacto
# ------------------------------------------------------------------------------------------------
EXACT_KEYS = {
    'pmf', 'value', 'tail_bound', 'expectation', 'exact_order_expectation', 'exact_mass_outside_bound',
    'tv_distance', 'frequency', 'lhs', 'rhs',
}


def exact_entries(document):
    """Pares (clave, valor) numéricos de un documento JSON, recorriendo listas y diccionarios anidados."""
    if isinstance(document, list):
        for item in document:
            yield from exact_entries(item)
    elif isinstance(document, dict):
        for key, value in document.items():
            if key in EXACT_KEYS and not isinstance(value, bool):
                yield key, value
            elif key.endswith('_decimal'):
                assert key[:-len('_decimal')] in document
            else:
                yield from exact_entries(value)


@pytest.mark.parametrize("argv", [
    ("pmf", "--measure", "general:p=2,u=1,d=2", "--partition", "[2]"),
    ("pmf", "--measure", "syminf:p=2", "--partition", "[]"),
    ("pmf", "--measure", "general:p=2,u=1/2,d=inf", "--partition", "[1]", "--decimal"),
    ("marginal", "--measure", "general:p=2,u=1,d=2", "--size", "2", "--decimal"),
    ("moment", "--measure", "general:p=2,u=1,d=1", "--mu", "[1]", "--mode", "truncated", "--max-size", "4"),
    ("moment", "--measure", "general:p=2,u=1/2,d=2", "--mu", "[1]", "--decimal"),
    ("torsion", "--measure", "general:p=2,u=1,d=1", "--ell", "1", "--decimal"),
    ("sample", "--measure", "sym:p=2,n=3", "--seed", "4", "--trials", "30"),
    ("montecarlo", "--ensemble", "square:1", "--p", "2", "--seed", "3", "--trials", "100",
     "--compare", "general:p=2,u=1,d=1", "--decimal"),
    ("quotient-sim", "--w", "1", "--p", "2", "--seed", "2", "--trials", "100"),
    ("validate", "--preset", "quick", "--decimal"),
])
def test_every_json_value_parses_back(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    entries = list(exact_entries(json.loads(out)))
    assert entries
    for key, value in entries:
        assert json_value(parse_json_value(value)) == value, key


def test_json_interval_matches_library_value(capsys, toolkit):
    code, out, _ = run(capsys, "pmf", "--measure", "syminf:p=2", "--partition", "[]", "--format", "json", "--decimal")
    document = json.loads(out)
    expected = toolkit.measures.pmf("syminf:p=2", Partition(()))
    assert code == 0
    assert isinstance(expected, Interval)
    assert Interval.from_json(document['pmf']) == expected
    assert document['pmf_decimal'] == render_value(expected, decimal=True)


def test_json_decimal_is_a_separate_field(capsys):
    code, out, _ = run(capsys, "pmf", "--measure", "general:p=2,u=1,d=1", "--partition", "[1]",
                       "--format", "json", "--decimal")
    assert code == 0
    assert json.loads(out) == {
        'measure': 'general:p=2,u=1,d=1', 'partition': '[1]', 'pmf': '1/4', 'pmf_decimal': '0.25',
    }


def test_text_interval_parses_back(capsys):
    code, out, _ = run(capsys, "pmf", "--measure", "syminf:p=2", "--partition", "[1]")
    assert code == 0
    assert Interval.parse(out).width >= 0


@pytest.mark.parametrize("argv", [
    ("torsion", "--measure", "sym:p=2,n=2", "--ell", "1"),
    ("torsion", "--measure", "general:p=2,u=1,d=1", "--ell", "0"),
    ("moment", "--measure", "alt:p=2,n=2", "--mu", "[1]"),
])
def test_moment_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


# ------------------------------------------------------------------------------------------------
# Muestreo y simulación
# ------------------------------------------------------------------------------------------------
def test_sample_zero_trials(capsys):
    assert run(capsys, "sample", "--measure", "general:p=2,u=1,d=1", "--seed", "1", "--trials", "0")[:2] == (0, "")


def test_sample_is_reproducible(capsys):
    argv = ("sample", "--measure", "general:p=2,u=1,d=3", "--seed", "123", "--trials", "20")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert len(first[1].splitlines()) == 20
    assert all(line.startswith("[") for line in first[1].splitlines())


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "--measure", "general:p=2,u=1,d=1", "--seed", "5", "--trials", "10",
                       "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[:3] == ["total,10", "ambiguous,0", "partition,count,frequency"]


@pytest.mark.parametrize("argv", [
    ("sample", "--measure", "general:p=2,u=1,d=1", "--trials", "5"),
    ("sample", "--measure", "general:p=2,u=1,d=1", "--seed", str(2 ** 64), "--trials", "5"),
    ("sample", "--measure", "general:p=2,u=1,d=1", "--seed", "-1", "--trials", "5"),
    ("sample", "--measure", "general:p=2,u=1,d=1", "--seed", "1", "--trials", "-1"),
    ("sample", "--measure", "general:p=2,u=1,d=1", "--seed", "1", "--trials", "5", "--jobs", "0"),
    ("montecarlo", "--ensemble", "square:2", "--p", "2", "--seed", "1", "--trials", "0"),
    ("montecarlo", "--ensemble", "square:3x2", "--p", "2", "--seed", "1", "--trials", "5"),
    ("montecarlo", "--ensemble", "square:2", "--p", "4", "--seed", "1", "--trials", "5"),
    ("montecarlo", "--ensemble", "square:2", "--p", "2", "--seed", "1", "--trials", "5", "--epsilon", "0"),
    ("quotient-sim", "--w", "0", "--p", "2", "--seed", "1", "--trials", "5"),
])
def test_random_command_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "[error]" in err


def test_montecarlo_json_comparison(capsys):
    code, out, _ = run(capsys, "montecarlo", "--ensemble", "square:1", "--p", "2", "--seed", "3", "--trials", "200",
                       "--compare", "general:p=2,u=1,d=1", "--format", "json")
    document = json.loads(out)
    assert code == 0
    assert document['trials'] == 200
    assert document['k'] == 8
    assert document['compare'] == "general:p=2,u=1,d=1"
    assert 'tv_distance' in document


def test_montecarlo_text_without_comparison(capsys):
    code, out, _ = run(capsys, "montecarlo", "--ensemble", "alt:2", "--p", "3", "--seed", "3", "--trials", "50",
                       "--precision-k", "4")
    assert code == 0
    assert out.startswith("total,50\n")


def test_quotient_sim_text(capsys):
    code, out, _ = run(capsys, "quotient-sim", "--w", "1", "--p", "2", "--seed", "9", "--trials", "100")
    assert code == 0
    assert out.startswith("tv_distance=")


# ------------------------------------------------------------------------------------------------
# Batería y generales
# ------------------------------------------------------------------------------------------------
def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--preset", "quick")
    assert code == 0
    assert out.startswith("[validate] OK (preset=quick")


def test_missing_command_is_usage_error(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "pmf", "--partition", "[1]")[0] == 2
    assert run(capsys, "validate", "--preset", "huge")[0] == 2


def test_version(capsys):
    assert run(capsys, "--version")[0] == 0


def test_output_file(capsys, tmp_path):
    target = tmp_path / "pmf.json"
    code, out, _ = run(capsys, "pmf", "--measure", "general:p=2,u=1,d=1", "--partition", "[]",
                       "--format", "json", "--out", str(target))
    assert (code, out) == (0, "")
    assert json.loads(target.read_text())['pmf'] == '1/2'


def test_run_config_defaults():
    args = build_parser().parse_args(["moment", "--measure", "general:p=2,u=1,d=2", "--mu", "[1]", "--max-size", "0"])
    config = RunConfig.from_args(args)
    assert config.max_size == 0
    assert config.mode == 'closed'
    assert config.fmt == 'text'
