import pytest
from hypothesis import given

from cokernel_toolkit.toolkit.partitions import (
    EMPTY, Partition, conjugate, enumerate_partitions, n_lambda, partition_number, partitions_up_to,
)
from tests.strategies import partitions


def test_enumeration_order():
    assert enumerate_partitions(4) == [
        Partition((4,)), Partition((3, 1)), Partition((2, 2)), Partition((2, 1, 1)), Partition((1, 1, 1, 1)),
    ]


def test_enumeration_with_bounded_parts():
    assert enumerate_partitions(4, 2) == [Partition((4,)), Partition((3, 1)), Partition((2, 2))]
    assert enumerate_partitions(0) == [EMPTY]
    assert enumerate_partitions(3, 0) == []


def test_enumeration_rejects_negative():
    with pytest.raises(ValueError):
        enumerate_partitions(-1)
    with pytest.raises(ValueError):
        enumerate_partitions(2, -1)


@pytest.mark.parametrize("n", range(41))
def test_enumeration_count_matches_partition_function(n):
    assert len(enumerate_partitions(n)) == partition_number(n)


def test_partition_number_values():
    assert [partition_number(n) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert partition_number(20) == 627
    assert partition_number(40) == 37338


def test_size_plus_twice_n_is_sum_of_squared_columns():
    assert len(partitions_up_to(20)) == sum(partition_number(n) for n in range(21))
    for partition in partitions_up_to(20):
        assert partition.n_lambda() == sum(index * part for index, part in enumerate(partition.parts))
        assert partition.size + 2 * partition.n_lambda() == sum(column * column for column in partition.columns())


def test_multiplicities_are_column_differences():
    for partition in partitions_up_to(20):
        columns = partition.columns() + (0,)
        assert partition.multiplicities() == [columns[i - 1] - columns[i] for i in range(1, partition.largest + 1)]
        assert partition.multiplicity(partition.largest + 1) == 0


def test_partitions_up_to():
    result = partitions_up_to(3)
    assert len(result) == 7
    assert [partition.size for partition in result] == sorted(partition.size for partition in result)


@pytest.mark.parametrize("text, parts", [
    ("[3,1,1]", (3, 1, 1)),
    ("[]", ()),
    (" [ 2 , 2 ] ", (2, 2)),
])
def test_parse(text, parts):
    assert Partition.parse(text) == Partition(parts)


@pytest.mark.parametrize("text", ["[2,3]", "3,1", "[0]", "[1,]", "(2,1)", ""])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        Partition.parse(text)


def test_constructor_rejects_increasing_parts():
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_statistics():
    partition = Partition((3, 1, 1))
    assert partition.size == 5
    assert partition.length == 3
    assert partition.columns() == (3, 1, 1)
    assert partition.multiplicities() == [2, 0, 1]
    assert str(partition) == "[3,1,1]"
    assert conjugate(Partition((3, 1))) == Partition((2, 1, 1))
    assert n_lambda(Partition((2, 1))) == 1
    assert n_lambda(Partition((1, 1, 1))) == 3
    assert not EMPTY
    assert str(EMPTY) == "[]"


def test_contains():
    assert Partition((2, 2)).contains(Partition((2, 1)))
    assert not Partition((2, 1)).contains(Partition((1, 1, 1)))
    assert Partition((1,)).contains(EMPTY)


@given(partitions())
def test_conjugate_is_an_involution(partition):
    assert partition.conjugate().conjugate() == partition
    assert partition.conjugate().size == partition.size
    assert partition.conjugate().length == partition.largest


@given(partitions())
def test_parse_of_str(partition):
    assert Partition.parse(str(partition)) == partition


@given(partitions())
def test_from_columns(partition):
    assert Partition.from_columns(partition.columns()) == partition
