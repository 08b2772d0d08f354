"""Brute-force bisimilarity and partition validity checks.

Deliberately independent of the refinement engine: no trees, no dirty
sets, no shared canonicalization.  Relatedness of two values under an
equivalence is decided by a direct recursive matching (forth-and-back for
sets, per-class probability sums for distributions), and the fixpoint is
computed on an explicit pair matrix.  Used to cross-check engine output.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coalgebra import Coalgebra
from .engine import Partition
from .values import DistVal, FunVal, FValue, InjVal, Label, SetVal, StateRef, TupleVal

__all__ = [
    "PairRelation",
    "bisim_bruteforce",
    "partitions_equal",
    "check_r_partitioning",
]

BRUTEFORCE_STATE_LIMIT = 10**4


class PairRelation:
    """A reflexive symmetric boolean matrix over states."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, fill: bool = False):
        self.n = n
        self.rows = [bytearray([1 if fill else 0]) * n for _ in range(n)]
        for x in range(n):
            self.rows[x][x] = 1

    @classmethod
    def total(cls, n: int) -> "PairRelation":
        return cls(n, fill=True)

    @classmethod
    def from_partition(cls, partition: Partition) -> "PairRelation":
        rel = cls(partition.n_states)
        for block in partition.blocks:
            for x in block:
                for y in block:
                    rel.rows[x][y] = 1
        return rel

    def related(self, x: int, y: int) -> bool:
        return bool(self.rows[x][y])

    def remove(self, x: int, y: int) -> None:
        if x == y:
            raise ValueError("the diagonal is fixed")
        self.rows[x][y] = 0
        self.rows[y][x] = 0

    def pairs(self) -> list[tuple[int, int]]:
        return [
            (x, y) for x in range(self.n) for y in range(x + 1, self.n) if self.rows[x][y]
        ]

    def closure_classes(self) -> list[list[int]]:
        """Connected components of the relation graph (equivalence closure)."""
        seen = [False] * self.n
        classes = []
        for x in range(self.n):
            if seen[x]:
                continue
            comp = []
            stack = [x]
            seen[x] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                row = self.rows[u]
                for v in range(self.n):
                    if row[v] and not seen[v]:
                        seen[v] = True
                        stack.append(v)
            classes.append(sorted(comp))
        return classes

    def is_equivalence(self) -> bool:
        for x in range(self.n):
            if not self.rows[x][x]:
                return False
            for y in range(x + 1, self.n):
                if self.rows[x][y] != self.rows[y][x]:
                    return False
        for cls_ in self.closure_classes():
            for x in cls_:
                for y in cls_:
                    if not self.rows[x][y]:
                        return False
        return True


def _lifted_related(a: FValue, b: FValue, class_of: Sequence[int]) -> bool:
    """One-step relatedness of two values under classes given by class_of."""
    if isinstance(a, StateRef):
        return isinstance(b, StateRef) and class_of[a.index] == class_of[b.index]
    if isinstance(a, Label):
        return isinstance(b, Label) and a.name == b.name
    if isinstance(a, TupleVal):
        return (
            isinstance(b, TupleVal)
            and len(a.items) == len(b.items)
            and all(_lifted_related(x, y, class_of) for x, y in zip(a.items, b.items))
        )
    if isinstance(a, InjVal):
        return (
            isinstance(b, InjVal)
            and a.tag == b.tag
            and _lifted_related(a.value, b.value, class_of)
        )
    if isinstance(a, FunVal):
        if not isinstance(b, FunVal) or len(a.entries) != len(b.entries):
            return False
        return all(
            ka == kb and _lifted_related(x, y, class_of)
            for (ka, x), (kb, y) in zip(a.entries, b.entries)
        )
    if isinstance(a, SetVal):
        if not isinstance(b, SetVal):
            return False
        forth = all(
            any(_lifted_related(x, y, class_of) for y in b.members) for x in a.members
        )
        back = all(
            any(_lifted_related(x, y, class_of) for x in a.members) for y in b.members
        )
        return forth and back
    if isinstance(a, DistVal):
        if not isinstance(b, DistVal):
            return False
        # mass per target class must agree; nested values are matched by a
        # representative-class key built from recursive relatedness
        return _class_masses(a, b, class_of)
    raise TypeError(f"not a value: {a!r}")


def _class_masses(a: DistVal, b: DistVal, class_of) -> bool:
    """Group both distributions' mass by relatedness and compare the sums."""
    if all(isinstance(v, StateRef) for v, _ in a.entries) and all(
        isinstance(v, StateRef) for v, _ in b.entries
    ):
        da: dict[int, Fraction] = {}
        db: dict[int, Fraction] = {}
        for v, p in a.entries:
            k = class_of[v.index]
            da[k] = da[k] + p if k in da else p
        for v, p in b.entries:
            k = class_of[v.index]
            db[k] = db[k] + p if k in db else p
        return da == db
    reps: list[FValue] = []
    sums_a: list[Fraction] = []
    sums_b: list[Fraction] = []

    def bucket(v: FValue) -> int:
        for i, r in enumerate(reps):
            if _lifted_related(v, r, class_of):
                return i
        reps.append(v)
        sums_a.append(Fraction(0))
        sums_b.append(Fraction(0))
        return len(reps) - 1

    for v, p in a.entries:
        sums_a[bucket(v)] += p
    for v, p in b.entries:
        sums_b[bucket(v)] += p
    return sums_a == sums_b


def bisim_bruteforce(coalg: Coalgebra) -> Partition:
    """Greatest-fixpoint bisimilarity by pair elimination.

    Start from the total relation; repeatedly drop pairs whose values are
    not one-step related under the classes of the current relation's
    equivalence closure.  The classes at the fixpoint are the answer.
    """
    n = coalg.n_states
    if n > BRUTEFORCE_STATE_LIMIT:
        raise ValueError(f"brute force capped at {BRUTEFORCE_STATE_LIMIT} states")
    rel = PairRelation.total(n)
    values = coalg.values
    while True:
        classes = rel.closure_classes()
        class_of = [0] * n
        for i, cls_ in enumerate(classes):
            for x in cls_:
                class_of[x] = i
        removed = False
        for x, y in rel.pairs():
            if not _lifted_related(values[x], values[y], class_of):
                rel.remove(x, y)
                removed = True
        if not removed:
            return Partition.from_blocks(classes, n)


def partitions_equal(p: Partition, q: Partition) -> bool:
    """Same kernel: identical grouping regardless of block numbering."""
    if p.n_states != q.n_states:
        raise ValueError(f"state counts differ: {p.n_states} vs {q.n_states}")
    seen: dict[int, int] = {}
    for x in range(p.n_states):
        a, b = p.block_of[x], q.block_of[x]
        if a in seen:
            if seen[a] != b:
                return False
        else:
            seen[a] = b
    return len(set(seen.values())) == len(seen)


def check_r_partitioning(partition: Partition, relation: PairRelation) -> bool:
    """Validity of a block family for an equivalence relation.

    Checks that (1) each block lies inside one relation class, (2) the
    equivalence closure of the blocks' internal total relations is exactly
    the relation, and (3) blocks are nonempty and pairwise disjoint.
    """
    if partition.n_states != relation.n:
        raise ValueError("partition and relation sizes differ")
    if not relation.is_equivalence():
        raise ValueError("relation is not an equivalence")

    seen: set[int] = set()
    for block in partition.blocks:
        if not block:
            return False
        for x in block:
            if x in seen:
                return False
            seen.add(x)

    for block in partition.blocks:
        first = block[0]
        if any(not relation.related(first, x) for x in block[1:]):
            return False

    induced = PairRelation(relation.n)
    for block in partition.blocks:
        for x in block:
            for y in block:
                induced.rows[x][y] = 1
    closure = PairRelation(relation.n)
    for cls_ in induced.closure_classes():
        for x in cls_:
            for y in cls_:
                closure.rows[x][y] = 1
    return closure.rows == relation.rows
