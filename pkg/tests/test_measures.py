from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cokernel_toolkit.toolkit.exact_arith import Interval
from cokernel_toolkit.toolkit.measures import (
    Family, MeasureSpec, alternating_specialization_check, petrogradsky_identity, pmf, pmf_alternating_sp_form,
    pmf_fw_form, pmf_petrogradsky_form, prob_num_parts, prob_size, prob_size_and_parts, quotient_spec,
    support_for_mass, tail_bound_size, truncated_mass,
)
from cokernel_toolkit.toolkit.partitions import EMPTY, Partition, enumerate_partitions, partitions_up_to
from tests.strategies import partitions

P = Partition
GRID = [(F(2), F(1)), (F(2), F(1, 2)), (F(3), F(1)), (F(7, 2), F(3, 2))]


# ------------------------------------------------------------------------------------------------
# MeasureSpec
# ------------------------------------------------------------------------------------------------
@pytest.mark.parametrize("text, family", [
    ("general:p=2,u=1/2,d=3", Family.GENERAL),
    ("general:p=2,u=1,d=inf", Family.GENERAL_INF),
    ("alt:p=3,n=4", Family.ALTERNATING),
    ("sym:p=2,n=3", Family.SYMMETRIC),
    ("syminf:p=2", Family.SYMMETRIC_INF),
    ("general:p=7/2,u=3/2,d=2", Family.GENERAL),
])
def test_parse_measure(text, family):
    spec = MeasureSpec.parse(text)
    assert spec.family is family
    assert str(spec) == text
    assert MeasureSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", [
    "general:p=2,u=3,d=1",
    "general:p=2,u=0,d=1",
    "general:p=1,u=1/2,d=1",
    "general:p=2,u=1",
    "general:p=2,u=1,d=0",
    "alt:p=2,n=3",
    "sym:p=2,n=0",
    "sym:p=2,n=2,u=1",
    "foo:p=2",
    "general p=2",
    "general:p=2,p=3,u=1,d=1",
])
def test_parse_measure_rejects(text):
    with pytest.raises(ValueError):
        MeasureSpec.parse(text)


def test_constructors():
    assert MeasureSpec.general(2, 1, None).family is Family.GENERAL_INF
    assert MeasureSpec.symmetric(None, 3).family is Family.SYMMETRIC_INF
    assert MeasureSpec.alternating(4, 2).specialized() == MeasureSpec.general(4, 2, 2)
    assert MeasureSpec.alternating(4, 2).max_parts == 2
    assert MeasureSpec.general(2, 1, None).max_parts is None
    assert quotient_spec(1, 2) == MeasureSpec.general(2, F(1, 2), None)
    with pytest.raises(ValueError):
        quotient_spec(0, 2)


# ------------------------------------------------------------------------------------------------
# pmf
# ------------------------------------------------------------------------------------------------
@pytest.mark.parametrize("k", range(6))
def test_pmf_single_part_geometric(k):
    spec = MeasureSpec.general(2, 1, 1)
    partition = P((k,)) if k else EMPTY
    assert pmf(spec, partition) == F(1, 2 ** (k + 1))


def test_pmf_examples():
    spec = MeasureSpec.general(2, 1, 2)
    assert pmf(spec, P((2,))) == F(9, 64)
    assert pmf(spec, P((1, 1))) == F(3, 128)
    assert pmf(spec, P((1, 1, 1))) == 0


@pytest.mark.parametrize("k, expected", [(0, F(1, 2)), (1, F(1, 4)), (2, F(1, 8)), (3, F(1, 16))])
def test_pmf_symmetric_one_by_one(k, expected):
    partition = P((k,)) if k else EMPTY
    assert pmf(MeasureSpec.symmetric(1, 2), partition) == expected


def test_pmf_infinite_families_return_enclosures():
    width = F(1, 2 ** 20)
    for spec in (MeasureSpec.general(2, 1, None), MeasureSpec.symmetric(None, 3)):
        value = pmf(spec, P((1,)), width)
        assert isinstance(value, Interval)
        assert value.width <= width
        assert 0 < value.lower


def test_pmf_infinite_limit_of_finite_d():
    exact = pmf(MeasureSpec.general(2, F(1, 2), None), P((2, 1)))
    approximations = [pmf(MeasureSpec.general(2, F(1, 2), d), P((2, 1))) for d in (10, 20, 40)]
    gaps = [abs(value - exact.midpoint) for value in approximations]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < F(1, 2 ** 30)


@pytest.mark.parametrize("p, u", GRID)
@pytest.mark.parametrize("d", [1, 2, 3])
def test_mass_is_bounded_by_tail(p, u, d):
    spec = MeasureSpec.general(p, u, d)
    for cut in (4, 8):
        captured = truncated_mass(spec, cut)
        assert captured <= 1 <= captured + tail_bound_size(spec, cut)


@pytest.mark.parametrize("p, u", GRID)
@pytest.mark.parametrize("d", [1, 2, 4])
def test_dual_form(p, u, d):
    spec = MeasureSpec.general(p, u, d)
    for partition in partitions_up_to(6, d):
        assert pmf(spec, partition) == pmf_petrogradsky_form(p, u, d, partition)


@pytest.mark.parametrize("p", [F(2), F(3), F(7, 2)])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_fw_form_and_rectangular_identity(p, d):
    spec = MeasureSpec.general(p, 1, d)
    for partition in partitions_up_to(6, d):
        assert pmf_fw_form(p, d, partition) == pmf(spec, partition)
        lhs, rhs = petrogradsky_identity(partition, d, p)
        assert lhs == rhs


def test_rectangular_identity_requires_fitting_partition():
    with pytest.raises(ValueError):
        petrogradsky_identity(P((1, 1, 1)), 2, 2)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [2, 4, 6])
def test_alternating_specialization(p, n):
    spec = MeasureSpec.alternating(n, p)
    for partition in partitions_up_to(5, n // 2):
        specialized, alternating = alternating_specialization_check(n, p, partition)
        assert specialized == alternating
        assert pmf_alternating_sp_form(n, p, partition) == alternating
    assert pmf(spec, P((1,) * (n // 2 + 1))) == 0


# ------------------------------------------------------------------------------------------------
# Marginales
# ------------------------------------------------------------------------------------------------
def test_marginal_examples():
    spec = MeasureSpec.general(2, 1, 2)
    assert prob_size(spec, 2) == F(21, 128)
    assert prob_size(MeasureSpec.general(2, 1, 1), 1) == F(1, 4)
    assert prob_size(MeasureSpec.general(2, 1, 1), 0) == F(1, 2)
    assert prob_num_parts(MeasureSpec.general(2, 1, 1), 0) == F(1, 2)
    assert prob_num_parts(MeasureSpec.general(2, 1, 1), 1) == F(1, 2)
    assert prob_num_parts(MeasureSpec.general(2, 1, 1), 2) == 0
    assert prob_size_and_parts(spec, 2, 1) == pmf(spec, P((2,)))
    assert prob_size_and_parts(spec, 2, 3) == 0
    assert prob_size_and_parts(spec, 0, 0) == F(3, 8)


@pytest.mark.parametrize("p, u", GRID)
@pytest.mark.parametrize("d", [1, 2, 3])
def test_size_and_joint_marginals(p, u, d):
    spec = MeasureSpec.general(p, u, d)
    for n in range(8):
        cells = {}
        for partition in enumerate_partitions(n, d):
            cells[partition.length] = cells.get(partition.length, F(0)) + pmf(spec, partition)
        assert sum(cells.values(), F(0)) == prob_size(spec, n)
        for r in range(d + 1):
            assert cells.get(r, F(0)) == prob_size_and_parts(spec, n, r)


@pytest.mark.parametrize("spec", [
    MeasureSpec.general(3, F(1, 2), 3),
    MeasureSpec.general(2, 1, 4),
    MeasureSpec.symmetric(3, 2),
    MeasureSpec.symmetric(4, 3),
    MeasureSpec.alternating(4, 2),
])
def test_parts_marginal_sums_to_one(spec):
    top = spec.specialized().max_parts
    assert sum((prob_num_parts(spec, r) for r in range(top + 1)), F(0)) == 1


def test_parts_marginal_infinite_families_enclose_partial_sums():
    for spec in (MeasureSpec.general(2, F(1, 2), None), MeasureSpec.symmetric(None, 2)):
        for r in range(3):
            value = prob_num_parts(spec, r)
            partial = sum(
                (pmf(spec, partition).lower for partition in partitions_up_to(10) if partition.length == r), F(0)
            )
            assert partial <= value.upper


def test_size_marginal_not_defined_for_symmetric():
    with pytest.raises(ValueError):
        prob_size(MeasureSpec.symmetric(2, 2), 1)
    with pytest.raises(ValueError):
        prob_size_and_parts(MeasureSpec.general(2, 1, None), 1, 1)


@settings(max_examples=30, deadline=None)
@given(partitions(max_part=3, max_parts=3), st.sampled_from(GRID))
def test_pmf_is_positive_within_support(partition, pu):
    p, u = pu
    assert pmf(MeasureSpec.general(p, u, 3), partition) > 0


# ------------------------------------------------------------------------------------------------
# Soporte
# ------------------------------------------------------------------------------------------------
@pytest.mark.parametrize("spec", [
    MeasureSpec.general(2, 1, 2),
    MeasureSpec.general(2, F(1, 2), None),
    MeasureSpec.symmetric(2, 3),
    MeasureSpec.alternating(2, 2),
])
def test_support_for_mass(spec):
    epsilon = F(1, 1000)
    support, outside, cut = support_for_mass(spec, epsilon)
    assert outside <= epsilon
    assert all(partition.size <= cut for partition in support)
    assert len(set(support)) == len(support)


def test_support_for_mass_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        support_for_mass(MeasureSpec.general(2, 1, 1), 0)


def test_measures_facade(toolkit):
    assert toolkit.measures.pmf("general:p=2,u=1,d=1", "[]") == F(1, 2)
    assert toolkit.measures.pmf("sym:p=2,n=1", "[3]") == F(1, 16)
    assert toolkit.measures.prob_size("general:p=2,u=1,d=2", 2) == F(21, 128)
    value = toolkit.measures.pmf("syminf:p=2", "[]")
    assert value.width <= toolkit.max_width
