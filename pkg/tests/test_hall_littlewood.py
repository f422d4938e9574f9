from fractions import Fraction as F
from itertools import permutations

import pytest

from cokernel_toolkit.toolkit.hall_littlewood import hl_eval, hl_pmf, principal_variables, v_lambda
from cokernel_toolkit.toolkit.measures import MeasureSpec, pmf
from cokernel_toolkit.toolkit.partitions import EMPTY, Partition, partitions_up_to

P = Partition


def test_v_lambda():
    assert v_lambda(EMPTY, 2, F(1, 2)) == F(3, 2)
    assert v_lambda(P((1, 1)), 2, F(1, 3)) == F(4, 3)
    assert v_lambda(P((2, 1)), 2, 1) == 1
    with pytest.raises(ValueError):
        v_lambda(P((1, 1, 1)), 2, F(1, 2))


@pytest.mark.parametrize("t", [0, F(1, 3), F(1, 2), 1])
def test_elementary_two_variables(t):
    assert hl_eval(P((1, 1)), [F(1, 2), F(1, 4)], t) == F(1, 8)


def test_schur_and_monomial_specializations():
    x = [F(1), F(2)]
    assert hl_eval(P((2,)), x, 0) == 7
    assert hl_eval(P((2,)), x, 1) == 5
    assert hl_eval(EMPTY, x, F(1, 2)) == 1


def test_symmetric_in_variables():
    x = [F(1, 2), F(1, 3), F(2, 5)]
    values = {hl_eval(P((2, 1)), list(order), F(1, 3)) for order in permutations(x)}
    assert len(values) == 1


@pytest.mark.parametrize("partition, x, max_vars", [
    (P((1,)), [F(1, 2), F(1, 2)], 8),
    (P((1,)), [F(0), F(1, 2)], 8),
    (P((1, 1, 1)), [F(1, 2), F(1, 3)], 8),
    (P((1,)), [F(1), F(2), F(3)], 2),
])
def test_hl_eval_rejects_invalid_variables(partition, x, max_vars):
    with pytest.raises(ValueError):
        hl_eval(partition, x, F(1, 2), max_vars)


def test_principal_variables():
    assert principal_variables(3, 1, 2) == [F(1, 2), F(1, 4), F(1, 8)]


@pytest.mark.parametrize("p, u", [(F(2), F(1)), (F(3), F(1, 2))])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_hl_pmf_matches_closed_form(p, u, d):
    spec = MeasureSpec.general(p, u, d)
    for partition in partitions_up_to(5, d):
        assert hl_pmf(partition, d, u, p) == pmf(spec, partition)


def test_hl_pmf_outside_support():
    assert hl_pmf(P((1, 1, 1)), 2, 1, 2) == 0
    with pytest.raises(ValueError):
        hl_pmf(P((1,)), 2, 3, 2)


def test_hall_littlewood_facade(toolkit):
    assert toolkit.hall_littlewood.pmf(P((1,)), 2, 1, 2) == pmf(MeasureSpec.general(2, 1, 2), P((1,)))
    assert toolkit.hall_littlewood.evaluate(P((1, 1)), [F(1, 2), F(1, 4)], F(1, 2)) == F(1, 8)
