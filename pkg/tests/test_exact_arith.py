from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cokernel_toolkit.toolkit.exact_arith import (
    Interval, as_rational, json_fields, json_value, parse_json_value, parse_rational, pochhammer,
    pochhammer_infinite, pochhammer_infinite_within,
    q_binomial, q_binomial_or_zero, q_factorial, q_integer, render_rational, render_value,
)
from tests.strategies import rationals


@pytest.mark.parametrize("text, expected", [
    ("3/4", F(3, 4)),
    ("-2", F(-2)),
    (" 6/8 ", F(3, 4)),
    ("0/5", F(0)),
])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1/0", "abc", "1.5", "", "1/-2", "2//3"])
def test_parse_rational_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_render_rational():
    assert render_rational(F(1, 2)) == "1/2"
    assert render_rational(F(4, 2)) == "2"
    assert render_rational(F(1, 3), decimal=True) == "0.333333333333"
    assert render_rational(F(1, 16), decimal=True) == "0.0625"


@given(rationals())
def test_render_then_parse_is_identity(value):
    assert parse_rational(render_rational(value)) == value


def test_as_rational_rejects_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("7/2") == F(7, 2)
    assert as_rational(3) == F(3)


# ------------------------------------------------------------------------------------------------
# Intervalos
# ------------------------------------------------------------------------------------------------
def test_interval_arithmetic():
    assert Interval(1, 2) * Interval(-1, 3) == Interval(-2, 6)
    assert Interval(1, 2) + F(1, 2) == Interval(F(3, 2), F(5, 2))
    assert 1 - Interval(F(1, 4), F(1, 2)) == Interval(F(1, 2), F(3, 4))
    assert Interval(1, 2) / Interval(2, 4) == Interval(F(1, 4), 1)
    assert Interval(F(1, 2), F(3, 4)).midpoint == F(5, 8)


def test_interval_errors():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ZeroDivisionError):
        Interval(1, 2) / Interval(-1, 1)


def test_render_value_interval():
    assert render_value(Interval(F(1, 2), F(3, 4))) == "[1/2, 3/4]"
    assert render_value(F(3, 8)) == "3/8"


@pytest.mark.parametrize("text, expected", [
    ("[1/2, 3/4]", Interval(F(1, 2), F(3, 4))),
    ("[0,1]", Interval(0, 1)),
    ("  [ -1/3 , 2 ] ", Interval(F(-1, 3), 2)),
    ("[5/8, 5/8]", Interval.exact(F(5, 8))),
])
def test_interval_parse(text, expected):
    assert Interval.parse(text) == expected


@pytest.mark.parametrize("text", ["1/2, 3/4", "[1/2]", "[1/2, 3/4, 1]", "[0.25, 0.75]", "[3/4, 1/2]", ""])
def test_interval_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        Interval.parse(text)


@given(rationals(), rationals())
def test_render_then_parse_interval_is_identity(a, b):
    interval = Interval(min(a, b), max(a, b))
    assert Interval.parse(render_value(interval)) == interval
    assert parse_json_value(json_value(interval)) == interval


def test_json_value_forms():
    assert json_value(F(3, 8)) == "3/8"
    assert json_value(2) == "2"
    assert json_value(Interval(F(1, 3), F(1, 2))) == {'lower': '1/3', 'upper': '1/2'}
    assert json_value(True) is True
    assert parse_json_value({'lower': '1/3', 'upper': '1/2'}) == Interval(F(1, 3), F(1, 2))
    assert parse_json_value("-7/9") == F(-7, 9)


@pytest.mark.parametrize("document", [{'lower': '1/3'}, {'lower': '1', 'upper': '2', 'mid': '1'}, 0.5, None])
def test_parse_json_value_rejects_malformed(document):
    with pytest.raises(ValueError):
        parse_json_value(document)


def test_json_fields_keeps_exact_value_next_to_decimal():
    assert json_fields('pmf', F(1, 3)) == {'pmf': '1/3'}
    assert json_fields('pmf', F(1, 3), decimal=True) == {'pmf': '1/3', 'pmf_decimal': '0.333333333333'}
    assert json_fields('tail', Interval(0, F(1, 4)), decimal=True) == {
        'tail': {'lower': '0', 'upper': '1/4'}, 'tail_decimal': '[0, 0.25]',
    }
    assert json_fields('unique', False, decimal=True) == {'unique': False}


# ------------------------------------------------------------------------------------------------
# Pochhammer
# ------------------------------------------------------------------------------------------------
@pytest.mark.parametrize("x, i, p, expected", [
    (F(1, 2), 2, 2, F(3, 8)),
    (F(1, 3), 2, 3, F(16, 27)),
    (1, 2, 3, F(0)),
    (F(5, 7), 0, 2, F(1)),
    (F(1, 2), 1, F(7, 2), F(1, 2)),
])
def test_pochhammer(x, i, p, expected):
    assert pochhammer(x, i, p) == expected


@pytest.mark.parametrize("p, i", [(1, 2), (F(1, 2), 1), (2, -1)])
def test_pochhammer_rejects_bad_arguments(p, i):
    with pytest.raises(ValueError):
        pochhammer(F(1, 2), i, p)


def test_pochhammer_infinite_single_term():
    assert pochhammer_infinite(F(1, 2), 2, 1) == Interval(F(9, 16), F(3, 4))


def test_pochhammer_infinite_nests_as_terms_grow():
    coarse = pochhammer_infinite(1, 3, 5)
    fine = pochhammer_infinite(1, 3, 30)
    assert coarse.lower <= fine.lower <= fine.upper <= coarse.upper
    assert fine.width < coarse.width


@pytest.mark.parametrize("x, p", [(1, 2), (F(1, 2), 2), (1, 3), (F(3, 2), F(7, 2))])
def test_pochhammer_infinite_within_width(x, p):
    width = F(1, 2 ** 40)
    enclosure = pochhammer_infinite_within(x, p, width)
    assert enclosure.width <= width
    assert enclosure.lower <= pochhammer(F(x) / p, 40, p)


def test_pochhammer_infinite_rejects_x_out_of_range():
    with pytest.raises(ValueError):
        pochhammer_infinite(3, 2, 4)


# ------------------------------------------------------------------------------------------------
# q-análogos
# ------------------------------------------------------------------------------------------------
def test_q_integers():
    assert q_integer(3, 2) == 7
    assert q_integer(2, 1) == 2
    assert q_factorial(3, 2) == 21


def test_q_binomial_values():
    assert q_binomial(4, 2, 2) == 35
    assert q_binomial(5, 0, 3) == 1
    assert q_binomial(5, 5, 3) == 1
    assert q_binomial(3, 1, 2) == 7


def test_q_binomial_range():
    with pytest.raises(ValueError):
        q_binomial(2, 3, 2)
    assert q_binomial_or_zero(2, 3, 2) == 0
    assert q_binomial_or_zero(-1, 0, 2) == 0


@given(st.integers(1, 12), st.data(), st.sampled_from([F(2), F(3), F(5, 2)]))
def test_q_pascal_rule(n, data, q):
    j = data.draw(st.integers(1, n))
    expected = q_binomial_or_zero(n - 1, j - 1, q) + q ** j * q_binomial_or_zero(n - 1, j, q)
    assert q_binomial(n, j, q) == expected


@given(st.integers(0, 10), st.data())
def test_q_binomial_symmetry(n, data):
    j = data.draw(st.integers(0, n))
    assert q_binomial(n, j, 3) == q_binomial(n, n - j, 3)
