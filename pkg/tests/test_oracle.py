"""Brute-force oracle and partition validity checks."""

import pytest

from bisimkit.coalgebra import Coalgebra
from bisimkit.engine import Partition
from bisimkit.functors import parse_functor
from bisimkit.oracle import (
    PairRelation,
    bisim_bruteforce,
    check_r_partitioning,
    partitions_equal,
)
from bisimkit.values import DistVal, FunVal, Label, StateRef, TupleVal


def dfa1(*rows):
    f = parse_functor("{0,1} * (X ^ {a})")
    values = [TupleVal((Label(b), FunVal((("a", StateRef(s)),)))) for b, s in rows]
    return Coalgebra.make(f, values)


def test_bruteforce_pure_distribution_one_block():
    c = Coalgebra.make(
        parse_functor("D X"),
        [DistVal(((StateRef((i + 1) % 4), 1),)) for i in range(4)],
    )
    assert bisim_bruteforce(c).blocks == ((0, 1, 2, 3),)


def test_bruteforce_chain_singletons():
    c = dfa1(("0", 1), ("0", 2), ("1", 2))
    assert bisim_bruteforce(c).blocks == ((0,), (1,), (2,))


def test_bruteforce_isomorphic_components_share_blocks():
    # two copies of the same 3-state machine: 0~3, 1~4, 2~5
    c = dfa1(("0", 1), ("0", 2), ("1", 2), ("0", 4), ("0", 5), ("1", 5))
    p = bisim_bruteforce(c)
    assert p.blocks == ((0, 3), (1, 4), (2, 5))


def test_bruteforce_size_cap():
    with pytest.raises(ValueError):
        bisim_bruteforce(
            Coalgebra.make(
                parse_functor("D X"),
                [DistVal(((StateRef(0), 1),))] * (10**4 + 1),
            )
        )


# -- partitions_equal ------------------------------------------------------------


def test_partitions_equal_identity():
    p = Partition.from_block_of([0, 1, 0])
    assert partitions_equal(p, p)


def test_partitions_equal_renamed_blocks():
    p = Partition.from_blocks([[0, 2], [1]], 3)
    q = Partition.from_blocks([[1], [0, 2]], 3)
    assert partitions_equal(p, q)


def test_partitions_equal_extra_split():
    p = Partition.from_blocks([[0, 1, 2]], 3)
    q = Partition.from_blocks([[0, 1], [2]], 3)
    assert not partitions_equal(p, q)
    assert not partitions_equal(q, p)


def test_partitions_equal_size_mismatch():
    with pytest.raises(ValueError):
        partitions_equal(Partition.from_block_of([0]), Partition.from_block_of([0, 0]))


# -- check_r_partitioning ----------------------------------------------------------


def classes_relation(*classes, n):
    p = Partition.from_blocks(classes, n)
    return PairRelation.from_partition(p)


def test_check_accepts_canonical_classes():
    rel = classes_relation([0, 1], [2, 3], n=4)
    part = Partition.from_blocks([[0, 1], [2, 3]], 4)
    assert check_r_partitioning(part, rel)


def test_check_rejects_straddling_block():
    rel = classes_relation([0, 1], [2, 3], n=4)
    part = Partition.from_blocks([[0, 2], [1, 3]], 4)
    assert not check_r_partitioning(part, rel)


def test_check_rejects_split_class():
    # a 3-element class split 2+1: the closure of the blocks is too fine
    rel = classes_relation([0, 1, 2], [3], n=4)
    part = Partition.from_blocks([[0, 1], [2], [3]], 4)
    assert not check_r_partitioning(part, rel)


def test_check_rejects_non_equivalence():
    rel = PairRelation(3)
    rel.rows[0][1] = 1  # asymmetric
    with pytest.raises(ValueError):
        check_r_partitioning(Partition.from_block_of([0, 0, 0]), rel)


def test_pair_relation_closure_classes():
    rel = PairRelation(4)
    rel.rows[0][1] = rel.rows[1][0] = 1
    rel.rows[1][2] = rel.rows[2][1] = 1
    assert rel.closure_classes() == [[0, 1, 2], [3]]
