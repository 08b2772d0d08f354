"""Partition refinement: the naive fixpoint and the worklist-optimized run.

Both algorithms compute the coarsest partition in which same-block states
have equal one-step signatures.  ``refine_naive`` re-groups every state in
every sweep until nothing splits.  ``refine_hopcroft`` keeps per-leaf
clean/dirty markings: a split recomputes signatures only for dirty states
(plus one clean representative), all children of a split start clean, and
only predecessors of the *non-heavy* children are re-dirtied.  The heavy
child is the one maximizing the selected block weight, which keeps the
total re-dirtying work within the light-children weight budget certified
by :mod:`bisimkit.wtree`.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .coalgebra import Coalgebra, PredIndex, SignatureEvaluator, build_pred_index
from .values import map_state_refs

__all__ = [
    "WEIGHT_KINDS",
    "ConfigurationError",
    "EngineInvariantError",
    "Partition",
    "RefinementTree",
    "RunStats",
    "RefineResult",
    "block_weight",
    "split_leaf",
    "mark_dirty",
    "refine_naive",
    "refine_hopcroft",
    "quotient",
]

WEIGHT_KINDS = ("card", "pred", "reach")


class ConfigurationError(ValueError):
    """A run was requested with missing or contradictory parameters."""


class EngineInvariantError(RuntimeError):
    """An internal consistency check failed; indicates an engine bug."""


@dataclass(frozen=True)
class Partition:
    """Blocks of states; canonical form has blocks sorted by smallest member."""

    block_of: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_block_of(cls, block_of: Sequence[int]) -> "Partition":
        groups: dict = {}
        for x, b in enumerate(block_of):
            groups.setdefault(b, []).append(x)
        ordered = sorted(groups.values(), key=lambda g: g[0])
        renumber = {}
        for i, g in enumerate(ordered):
            for x in g:
                renumber[x] = i
        return cls(
            tuple(renumber[x] for x in range(len(block_of))),
            tuple(tuple(g) for g in ordered),
        )

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n_states: int) -> "Partition":
        block_of = [-1] * n_states
        for i, g in enumerate(blocks):
            for x in g:
                if not 0 <= x < n_states:
                    raise ValueError(f"state {x} out of range")
                if block_of[x] != -1:
                    raise ValueError(f"state {x} appears in two blocks")
                block_of[x] = i
        if any(b == -1 for b in block_of):
            missing = [x for x, b in enumerate(block_of) if b == -1]
            raise ValueError(f"states not covered by any block: {missing[:5]}")
        return cls.from_block_of(block_of)

    @property
    def n_states(self) -> int:
        return len(self.block_of)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


@dataclass
class RefinementTree:
    """History of block splits; node 0 is the full state space.

    Arrays indexed by node id: ``parent`` (root points to itself),
    ``weight`` under the run's weight kind, ``heavy`` (node id of the
    heavy child, None at leaves), ``states`` (sorted, frozen at creation).
    Children were appended in order of smallest member, so child node ids
    increase with child position.
    """

    weight_kind: str
    parent: list[int] = field(default_factory=list)
    weight: list[int] = field(default_factory=list)
    heavy: list[Optional[int]] = field(default_factory=list)
    states: list[tuple[int, ...]] = field(default_factory=list)

    def add_node(self, parent: int, weight: int, states: tuple[int, ...]) -> int:
        node = len(self.parent)
        self.parent.append(parent if parent >= 0 else node)
        self.weight.append(weight)
        self.heavy.append(None)
        self.states.append(states)
        return node

    @property
    def node_count(self) -> int:
        return len(self.parent)

    def children(self, v: int) -> list[int]:
        return [u for u in range(1, self.node_count) if self.parent[u] == v]

    def leaves(self) -> list[int]:
        internal = {self.parent[u] for u in range(1, self.node_count)}
        return [v for v in range(self.node_count) if v not in internal]

    def heavy_choice(self) -> dict[int, int]:
        return {v: h for v, h in enumerate(self.heavy) if h is not None}


@dataclass
class RunStats:
    """Counters exposed as part of a refinement result."""

    iterations: int = 0
    splits: int = 0
    dirty_markings: int = 0
    markdirty_touches: int = 0
    signatures_computed: int = 0
    wall_time: float = 0.0


@dataclass
class RefineResult:
    partition: Partition
    stats: RunStats
    tree: Optional[RefinementTree] = None


def block_weight(
    kind: str,
    states: Iterable[int],
    pred_index: Optional[PredIndex] = None,
    reachable: Optional[set[int]] = None,
) -> int:
    """Weight of a state set: its size, total in-degree, or reachable count."""
    if kind == "card":
        return sum(1 for _ in states)
    if kind == "pred":
        if pred_index is None:
            raise ConfigurationError("pred weight needs a predecessor index")
        return sum(len(pred_index.preds[x]) for x in states)
    if kind == "reach":
        if reachable is None:
            raise ConfigurationError("reach weight needs the reachable-target set")
        return sum(1 for x in states if x in reachable)
    raise ConfigurationError(f"unknown weight kind {kind!r}")


def _weight_vector(kind: str, coalg: Coalgebra, pidx: PredIndex) -> list[int]:
    if kind == "card":
        return [1] * coalg.n_states
    if kind == "pred":
        return [len(p) for p in pidx.preds]
    if kind == "reach":
        reach = {y for y in range(coalg.n_states) if pidx.preds[y]}
        return [1 if x in reach else 0 for x in range(coalg.n_states)]
    raise ConfigurationError(f"unknown weight kind {kind!r}")


def split_leaf(
    leaf_states: set[int],
    clean: set[int],
    coalg: Coalgebra,
    current,
    evaluator: Optional[SignatureEvaluator] = None,
    stats: Optional[RunStats] = None,
) -> list[list[int]]:
    """Group a leaf's states by signature, touching only dirty states.

    ``current`` is the surrounding partition (a Partition or a plain
    state -> block-id sequence).  Signatures are computed for the dirty
    states plus at most one clean representative; the whole clean set
    joins the representative's group.  Groups come back ordered by
    smallest member, members ascending.  A single returned group means
    the trivial split.
    """
    if not leaf_states:
        raise ValueError("leaf must be nonempty")
    if not clean <= leaf_states:
        raise ValueError("clean set must be contained in the leaf")
    block_of = current.block_of if isinstance(current, Partition) else current
    ev = evaluator or SignatureEvaluator(coalg)
    dirty = sorted(leaf_states - clean)
    nsigs = 0
    if not dirty:
        return [sorted(leaf_states)]
    groups: dict = {}
    for x in dirty:
        groups.setdefault(ev.signature(x, block_of), []).append(x)
        nsigs += 1
    if clean:
        rep = next(iter(clean))
        rep_sig = ev.signature(rep, block_of)
        nsigs += 1
        merged = sorted(groups.pop(rep_sig, []) + list(clean))
        out = [merged] + list(groups.values())
    else:
        out = list(groups.values())
    if stats is not None:
        stats.signatures_computed += nsigs
    out.sort(key=lambda g: g[0])
    return out


def mark_dirty(
    children: Sequence[Optional[Sequence[int]]],
    heavy_index: int,
    pred_index: PredIndex,
    leaf_of: Sequence[int],
    dirty_sets: Mapping[int, set[int]],
) -> tuple[list[tuple[int, int]], int]:
    """Mark predecessors of every non-heavy child's states as dirty.

    ``leaf_of`` maps a state to its current leaf id and ``dirty_sets`` holds
    each leaf's dirty states (mutated in place).  Returns the markings
    actually performed (a state already dirty is not re-marked) and the
    number of (successor, predecessor) pairs visited.
    """
    preds = pred_index.preds
    markings: list[tuple[int, int]] = []
    touches = 0
    for k, members in enumerate(children):
        if k == heavy_index:
            continue
        if members is None:
            raise ValueError("only the heavy child may be omitted")
        for y in members:
            ps = preds[y]
            touches += len(ps)
            for x in ps:
                leaf = leaf_of[x]
                dset = dirty_sets[leaf]
                if x not in dset:
                    dset.add(x)
                    markings.append((leaf, x))
    return markings, touches


def refine_naive(coalg: Coalgebra, snapshots: Optional[list] = None) -> RefineResult:
    """Fixpoint by global sweeps: re-group all states until no block splits."""
    start = time.perf_counter()
    n = coalg.n_states
    ev = SignatureEvaluator(coalg)
    block_of: list[int] = [0] * n
    n_blocks = 1
    stats = RunStats()
    while True:
        if snapshots is not None:
            snapshots.append(Partition.from_block_of(block_of))
        stats.iterations += 1
        groups: dict = {}
        for x in range(n):
            groups.setdefault((block_of[x], ev.signature(x, block_of)), []).append(x)
        stats.signatures_computed += n
        if len(groups) == n_blocks:
            break
        old_blocks: dict = {}
        new_block_of = [0] * n
        for i, g in enumerate(groups.values()):
            old_blocks.setdefault(block_of[g[0]], []).append(i)
            for x in g:
                new_block_of[x] = i
        stats.splits += sum(1 for parts in old_blocks.values() if len(parts) > 1)
        block_of = new_block_of
        n_blocks = len(groups)
    stats.wall_time = time.perf_counter() - start
    if snapshots is not None:
        snapshots.append(Partition.from_block_of(block_of))
    return RefineResult(Partition.from_block_of(block_of), stats)


def refine_hopcroft(
    coalg: Coalgebra,
    weight: str = "card",
    snapshots: Optional[list] = None,
) -> RefineResult:
    """Worklist refinement with clean/dirty bookkeeping and weighted splits.

    Returns the same partition as :func:`refine_naive`, plus the refinement
    tree (weights under ``weight``, heavy children marked) and counters.
    When ``snapshots`` is a list, the leaf partition is appended at every
    main-loop boundary.
    """
    if weight not in WEIGHT_KINDS:
        raise ConfigurationError(f"unknown weight kind {weight!r}")
    start = time.perf_counter()
    n = coalg.n_states
    ev = SignatureEvaluator(coalg)
    pidx = build_pred_index(coalg)
    wvec = _weight_vector(weight, coalg, pidx)
    stats = RunStats()

    block_of: list[int] = [0] * n
    leaf_states: dict[int, set[int]] = {0: set(range(n))}
    leaf_min: dict[int, int] = {0: 0}
    dirty: dict[int, set[int]] = {0: set(range(n))}
    next_leaf = 1

    tree = RefinementTree(weight_kind=weight)
    root_states = tuple(range(n))
    tree.add_node(-1, sum(wvec), root_states)
    node_of: dict[int, int] = {0: 0}

    queue: deque[int] = deque([0])
    in_queue: set[int] = {0}

    def snapshot():
        if snapshots is not None:
            snapshots.append(
                Partition.from_blocks(
                    (sorted(s) for s in leaf_states.values()), n
                )
            )

    while queue:
        rho = queue.popleft()
        in_queue.discard(rho)
        drt = dirty[rho]
        if not drt:
            continue  # leaf was fully re-cleaned by an earlier split
        snapshot()
        stats.iterations += 1
        states = leaf_states[rho]
        if len(states) == 1:
            dirty[rho] = set()  # a singleton can never split
            continue

        dirty_sorted = sorted(drt)
        groups: dict = {}
        for x in dirty_sorted:
            groups.setdefault(ev.signature(x, block_of), []).append(x)
        nsigs = len(dirty_sorted)
        rep_sig = None
        has_clean = len(drt) < len(states)
        if has_clean:
            for s in states:
                if s not in drt:
                    rep = s
                    break
            rep_sig = ev.signature(rep, block_of)
            nsigs += 1
        stats.signatures_computed += nsigs

        if has_clean:
            groups.pop(rep_sig, None)  # those dirty states rejoin the clean mass
        if not groups or (not has_clean and len(groups) == 1):
            dirty[rho] = set()  # trivial split: everything here is clean now
            continue

        stats.splits += 1
        explicit = sorted(groups.values(), key=lambda g: g[0])

        # the clean-mass child: all clean states plus dirty ones matching the
        # representative; known only implicitly until materialized
        child_specs: list[dict] = []
        if has_clean:
            moved = set()
            for g in explicit:
                moved.update(g)
            if leaf_min[rho] not in moved:
                implicit_min = leaf_min[rho]
            else:
                implicit_min = min(s for s in states if s not in moved)
            imp_weight = tree.weight[node_of[rho]] - sum(
                wvec[x] for g in explicit for x in g
            )
            child_specs.append(
                {"members": None, "min": implicit_min, "weight": imp_weight}
            )
        for g in explicit:
            child_specs.append(
                {"members": g, "min": g[0], "weight": sum(wvec[x] for x in g)}
            )
        child_specs.sort(key=lambda c: c["min"])

        heavy_idx = 0
        for i, c in enumerate(child_specs):
            if c["weight"] > child_specs[heavy_idx]["weight"]:
                heavy_idx = i

        # materialize the clean-mass child unless it will inherit the leaf
        implicit_heavy = child_specs[heavy_idx]["members"] is None
        if has_clean and not implicit_heavy:
            for c in child_specs:
                if c["members"] is None:
                    c["members"] = sorted(s for s in states if s not in moved)
                    break

        # assign live leaf ids: the heavy child inherits rho's id, so only
        # light-children states get relabeled
        parent_node = node_of[rho]
        new_leaf_ids = []
        for i, c in enumerate(child_specs):
            if i == heavy_idx:
                new_leaf_ids.append(rho)
            else:
                new_leaf_ids.append(next_leaf)
                next_leaf += 1
        for i, c in enumerate(child_specs):
            if i == heavy_idx:
                continue
            lid = new_leaf_ids[i]
            members = c["members"]
            for x in members:
                block_of[x] = lid
                states.discard(x)
            leaf_states[lid] = set(members)
            leaf_min[lid] = c["min"]
            dirty[lid] = set()
        # what remains of the old leaf set is exactly the heavy child
        leaf_min[rho] = child_specs[heavy_idx]["min"]
        dirty[rho] = set()

        # record the split in the refinement tree
        child_nodes = []
        for i, c in enumerate(child_specs):
            members = c["members"]
            frozen = tuple(sorted(states)) if members is None else tuple(members)
            node = tree.add_node(parent_node, c["weight"], frozen)
            child_nodes.append(node)
            node_of[new_leaf_ids[i]] = node
        tree.heavy[parent_node] = child_nodes[heavy_idx]

        children_for_marking = [
            None if i == heavy_idx else tree.states[child_nodes[i]]
            for i in range(len(child_specs))
        ]
        markings, touches = mark_dirty(
            children_for_marking, heavy_idx, pidx, block_of, dirty
        )
        stats.markdirty_touches += touches
        stats.dirty_markings += len(markings)
        for leaf, _ in markings:
            if leaf not in in_queue:
                in_queue.add(leaf)
                queue.append(leaf)

    snapshot()
    stats.wall_time = time.perf_counter() - start
    partition = Partition.from_blocks((sorted(s) for s in leaf_states.values()), n)
    return RefineResult(partition, stats, tree)


def quotient(coalg: Coalgebra, partition: Partition) -> Coalgebra:
    """Collapse each block to one state, rewriting successors to block ids.

    Well-defined only for the engine's output partition, where all members
    of a block share a signature; violations raise EngineInvariantError.
    """
    ev = SignatureEvaluator(coalg)
    for block in partition.blocks:
        sig0 = ev.signature(block[0], partition.block_of)
        for x in block[1:]:
            if ev.signature(x, partition.block_of) != sig0:
                raise EngineInvariantError(
                    f"states {block[0]} and {x} share a block but differ in signature"
                )
    values = []
    for block in partition.blocks:
        rep = coalg.values[block[0]]
        values.append(map_state_refs(rep, lambda s: partition.block_of[s]))
    return Coalgebra.make(coalg.functor, values)
