"""Rooted weighted trees: heavy-child choices, tightening, and bound audits.

This module is the certification toolkit for refinement trees: trees whose
node weights shrink along edges (children sum to at most the parent).  It
checks the classic amortization argument behind Hopcroft-style partition
refinement, culminating in the bound

    sum of light-children weights  <=  w(root)*log2 w(root) - sum over
    nonzero leaves of w(leaf)*log2 w(leaf)

which is verified with an exact integer decision procedure, never by
floating point alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import mpmath

__all__ = [
    "MalformedTreeError",
    "WeightedTree",
    "WeightCheck",
    "BoundCheck",
    "AuditReport",
    "validate_weight",
    "choose_heavy",
    "tighten",
    "light_child_sum",
    "lpath_weighted_leaf_sum",
    "general_edge_sum",
    "lpath_length_bound_check",
    "hopcroft_bound_check",
    "audit_tree",
]


class MalformedTreeError(ValueError):
    """Raised for inputs that do not describe a rooted tree."""


class WeightedTree:
    """A rooted finite tree given by a parent array.

    ``parent[i]`` is the parent of node ``i``; the root points to itself.
    Children are ordered by increasing node id, which fixes the positional
    tie-break used by :func:`choose_heavy`.
    """

    __slots__ = ("node_count", "parent", "children", "root")

    def __init__(self, parent: Sequence[int]):
        n = len(parent)
        if n == 0:
            raise MalformedTreeError("tree must have at least one node")
        root = -1
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if not 0 <= p < n:
                raise MalformedTreeError(f"parent of node {v} out of range: {p}")
            if p == v:
                if root >= 0:
                    raise MalformedTreeError(f"multiple roots: {root} and {v}")
                root = v
            else:
                children[p].append(v)
        if root < 0:
            raise MalformedTreeError("no root (some parent[i] must equal i)")
        # connectivity: walking up from any node must reach the root
        seen_depth = [-1] * n
        seen_depth[root] = 0
        for v in range(n):
            path = []
            u = v
            while seen_depth[u] < 0:
                path.append(u)
                u = parent[u]
                if len(path) > n:
                    raise MalformedTreeError("parent links contain a cycle")
            base = seen_depth[u]
            for i, w in enumerate(reversed(path)):
                seen_depth[w] = base + i + 1
        self.node_count = n
        self.parent = tuple(parent)
        self.children = tuple(tuple(c) for c in children)
        self.root = root

    def leaves(self) -> list[int]:
        return [v for v in range(self.node_count) if not self.children[v]]

    def internal_nodes(self) -> list[int]:
        return [v for v in range(self.node_count) if self.children[v]]

    def topo_order(self) -> list[int]:
        """Nodes in root-first order (every parent before its children)."""
        order = [self.root]
        for v in order:
            order.extend(self.children[v])
        return order

    def edges(self) -> list[tuple[int, int]]:
        return [(p, c) for p in range(self.node_count) for c in self.children[p]]


class WeightCheck(NamedTuple):
    valid: bool
    tight: bool


class BoundCheck(NamedTuple):
    ok: bool
    lhs: int
    bound_float: float


def _check_weights_shape(tree: WeightedTree, w: Sequence[int]) -> None:
    if len(w) != tree.node_count:
        raise MalformedTreeError(
            f"weight assignment covers {len(w)} nodes, tree has {tree.node_count}"
        )
    for v, x in enumerate(w):
        if not isinstance(x, int) or x < 0:
            raise MalformedTreeError(f"weight of node {v} is not a natural number: {x!r}")


def validate_weight(tree: WeightedTree, w: Sequence[int]) -> WeightCheck:
    """Check the weight law (children sum <= parent) and tightness (equality)."""
    _check_weights_shape(tree, w)
    valid = True
    tight = True
    for v in range(tree.node_count):
        ch = tree.children[v]
        if not ch:
            continue
        s = sum(w[u] for u in ch)
        if s > w[v]:
            valid = False
        if s != w[v]:
            tight = False
    return WeightCheck(valid, valid and tight)


def choose_heavy(tree: WeightedTree, w: Sequence[int]) -> dict[int, int]:
    """Pick, for each internal node, a maximum-weight child.

    Ties go to the smallest child position so runs are reproducible.
    """
    _check_weights_shape(tree, w)
    h: dict[int, int] = {}
    for v in range(tree.node_count):
        ch = tree.children[v]
        if not ch:
            continue
        best = ch[0]
        for u in ch[1:]:
            if w[u] > w[best]:
                best = u
        h[v] = best
    return h


def _check_hcc(tree: WeightedTree, w: Sequence[int], h: dict[int, int]) -> None:
    for v in tree.internal_nodes():
        if v not in h:
            raise ValueError(f"heavy choice missing for internal node {v}")
        u = h[v]
        if u not in tree.children[v]:
            raise ValueError(f"heavy child {u} is not a child of {v}")
        if w[u] != max(w[c] for c in tree.children[v]):
            raise ValueError(f"heavy child {u} of {v} is not of maximal weight")


def tighten(tree: WeightedTree, w: Sequence[int], h: dict[int, int]) -> list[int]:
    """Reweight so every internal node's children sum exactly to it.

    Root and light children keep their original weights; each heavy child
    absorbs the slack.  The result dominates ``w`` pointwise and keeps ``h``
    valid as a heavy-child choice.
    """
    _check_weights_shape(tree, w)
    out = list(w)
    for v in tree.topo_order():
        ch = tree.children[v]
        if not ch:
            continue
        hv = h[v]
        light_total = sum(w[u] for u in ch if u != hv)
        out[hv] = out[v] - light_total
    return out


def light_child_sum(tree: WeightedTree, w: Sequence[int], h: dict[int, int]) -> int:
    """Total weight of all light children, summed over every internal node."""
    total = 0
    for v in tree.internal_nodes():
        hv = h[v]
        total += sum(w[u] for u in tree.children[v] if u != hv)
    return total


def _light_depths(tree: WeightedTree, h: dict[int, int]) -> list[int]:
    """Number of light edges on the root-to-node path, per node."""
    d = [0] * tree.node_count
    for v in tree.topo_order():
        for u in tree.children[v]:
            d[u] = d[v] + (0 if h[v] == u else 1)
    return d


def lpath_weighted_leaf_sum(tree: WeightedTree, w: Sequence[int], h: dict[int, int]) -> int:
    """Sum over leaves of (light edges on the root path) * leaf weight."""
    depths = _light_depths(tree, h)
    return sum(depths[l] * w[l] for l in tree.leaves())


def general_edge_sum(
    tree: WeightedTree, w: Sequence[int], s: set[tuple[int, int]]
) -> tuple[int, int]:
    """Both sides of the edge-exclusion inequality for an edge set ``s``.

    Returns ``(lhs, rhs)`` where lhs sums child weights over edges outside
    ``s`` and rhs sums, per leaf, the number of root-path edges outside ``s``
    times the leaf weight.  The contract is lhs >= rhs, with equality for
    tight weights.
    """
    _check_weights_shape(tree, w)
    edge_set = set(tree.edges())
    for e in s:
        if e not in edge_set:
            raise MalformedTreeError(f"edge {e} not in tree")
    lhs = 0
    for v in range(tree.node_count):
        for u in tree.children[v]:
            if (v, u) not in s:
                lhs += w[u]
    # per-node count of root-path edges outside s
    excl = [0] * tree.node_count
    for v in tree.topo_order():
        for u in tree.children[v]:
            excl[u] = excl[v] + (0 if (v, u) in s else 1)
    rhs = sum(excl[l] * w[l] for l in tree.leaves())
    return lhs, rhs


def lpath_length_bound_check(tree: WeightedTree, w: Sequence[int], h: dict[int, int]) -> bool:
    """Check 2^(light edges to v) * w(v) <= w(root) for every nonzero-weight v.

    Equivalent to the log form  |lpath(r,v)| <= log2 w(r) - log2 w(v),
    but decided exactly in integers.
    """
    depths = _light_depths(tree, h)
    wr = w[tree.root]
    for v in range(tree.node_count):
        if w[v] != 0 and (w[v] << depths[v]) > wr:
            return False
    return True


# -- exact decision for  2^lhs * prod w^w <= root^root ------------------------

_EXACT_DIRECT_WEIGHT = 1000
_EXACT_DIRECT_NODES = 1000


def _factorize(x: int) -> dict[int, int]:
    f: dict[int, int] = {}
    d = 2
    while d * d <= x:
        while x % d == 0:
            f[d] = f.get(d, 0) + 1
            x //= d
        d += 1 if d == 2 else 2
    if x > 1:
        f[x] = f.get(x, 0) + 1
    return f


def _products_equal(lhs: int, leaf_weights: Sequence[int], root_w: int) -> bool:
    """Whether 2^lhs * prod w^w == root^root, via prime exponent vectors."""
    exps: dict[int, int] = {2: lhs}
    for x in leaf_weights:
        for p, e in _factorize(x).items():
            exps[p] = exps.get(p, 0) + e * x
    for p, e in _factorize(root_w).items():
        exps[p] = exps.get(p, 0) - e * root_w
    return all(e == 0 for e in exps.values())


def _product_log_le(lhs: int, leaf_weights: Sequence[int], root_w: int) -> bool:
    """Exact verdict of  2^lhs * prod_{w in leaf_weights} w^w  <=  root_w^root_w.

    ``leaf_weights`` must contain only nonzero entries.  Fast path is float64
    with a rigorous error margin; ties fall back to an exact equality test on
    prime exponents, then adaptive-precision logarithms, then full bignum
    arithmetic.  Small instances are decided by bignum directly.
    """
    if root_w == 0:
        # weight law forces every weight to 0, so no nonzero leaves survive
        return lhs == 0 and not leaf_weights
    if root_w <= _EXACT_DIRECT_WEIGHT and len(leaf_weights) + 1 <= _EXACT_DIRECT_NODES:
        a = 1 << lhs
        for x in leaf_weights:
            a *= x**x
        return a <= root_w**root_w

    def diff_and_mag(log2):
        pos = root_w * log2(root_w)
        neg = lhs + sum(x * log2(x) for x in leaf_weights)
        return pos - neg, pos + neg

    d, mag = diff_and_mag(math.log2)
    err = (len(leaf_weights) + 4) * float(mag) * 2.0**-50 + 1e-12
    if d > err:
        return True
    if d < -err:
        return False
    if _products_equal(lhs, leaf_weights, root_w):
        return True
    prec = 100
    while prec <= 6400:
        with mpmath.workprec(prec):
            d, mag = diff_and_mag(lambda x: mpmath.log(x, 2))
            err = (len(leaf_weights) + 4) * mag * mpmath.mpf(2) ** (-prec + 8)
            if abs(d) > err:
                return d > 0
        prec *= 2
    a = 1 << lhs
    for x in leaf_weights:
        a *= x**x
    return a <= root_w**root_w


def hopcroft_bound_check(
    tree: WeightedTree, w: Sequence[int], h: dict[int, int]
) -> BoundCheck:
    """Verify the light-children weight bound for a weighted tree with hcc ``h``.

    The sum of light-children weights must not exceed
    ``w(r)*log2 w(r) - sum(w(l)*log2 w(l))`` over nonzero-weight leaves.
    The verdict comes from an exact integer comparison; ``bound_float`` is
    reported for diagnostics only.
    """
    lhs = light_child_sum(tree, w, h)
    leaf_ws = [w[l] for l in tree.leaves() if w[l] != 0]
    wr = w[tree.root]
    ok = _product_log_le(lhs, leaf_ws, wr)
    bound_float = 0.0
    if wr > 0:
        bound_float = wr * math.log2(wr) - sum(x * math.log2(x) for x in leaf_ws)
    return BoundCheck(ok, lhs, bound_float)


FLOAT_BOUND_RELTOL = 1e-9


@dataclass
class AuditReport:
    """Outcome of every structural and bound check on one weighted tree."""

    valid: bool
    tight: bool
    lemma1_ok: bool = False  # edge-exclusion sums for S in {none, heavy, all}
    lemma2_ok: bool = False  # light sum vs weighted light-path sum
    lemma3_ok: bool = False  # tightening properties
    lemma4_ok: bool = False  # per-node light-path length bound
    theorem1_ok: bool = False  # the headline weight bound
    light_sum: int = 0
    lpath_sum: int = 0
    bound_exact_ok: bool = False
    bound_float: float = 0.0

    def all_ok(self) -> bool:
        return (
            self.valid
            and self.lemma1_ok
            and self.lemma2_ok
            and self.lemma3_ok
            and self.lemma4_ok
            and self.theorem1_ok
        )


def audit_tree(
    tree: WeightedTree, w: Sequence[int], heavy: Optional[dict[int, int]] = None
) -> AuditReport:
    """Run every check on a weighted tree and aggregate the outcomes.

    ``heavy`` may supply an externally recorded heavy-child choice (e.g. the
    one a refinement run actually made); it is validated against the weights.
    If the weight law fails, all remaining checks are skipped.
    """
    valid, tight = validate_weight(tree, w)
    if not valid:
        return AuditReport(valid=False, tight=False)
    h = choose_heavy(tree, w) if heavy is None else dict(heavy)
    _check_hcc(tree, w, h)

    heavy_edges = {(v, h[v]) for v in tree.internal_nodes()}
    all_edges = set(tree.edges())
    lemma1_ok = True
    for s in (set(), heavy_edges, all_edges):
        lhs, rhs = general_edge_sum(tree, w, s)
        if lhs < rhs or (tight and lhs != rhs):
            lemma1_ok = False

    light_sum = light_child_sum(tree, w, h)
    lpath_sum = lpath_weighted_leaf_sum(tree, w, h)
    lemma2_ok = light_sum >= lpath_sum and (not tight or light_sum == lpath_sum)

    w2 = tighten(tree, w, h)
    lemma3_ok = (
        validate_weight(tree, w2) == WeightCheck(True, True)
        and w2[tree.root] == w[tree.root]
        and all(w2[v] >= w[v] for v in range(tree.node_count))
    )
    if lemma3_ok:
        try:
            _check_hcc(tree, w2, h)
        except ValueError:
            lemma3_ok = False
        else:
            # after tightening, the inequality closes to an equality
            lemma3_ok = light_child_sum(tree, w2, h) == lpath_weighted_leaf_sum(tree, w2, h)

    lemma4_ok = lpath_length_bound_check(tree, w, h)

    ok, lhs, bound_float = hopcroft_bound_check(tree, w, h)
    margin = FLOAT_BOUND_RELTOL * max(1.0, abs(bound_float))
    theorem1_ok = ok and lhs <= bound_float + margin

    return AuditReport(
        valid=True,
        tight=tight,
        lemma1_ok=lemma1_ok,
        lemma2_ok=lemma2_ok,
        lemma3_ok=lemma3_ok,
        lemma4_ok=lemma4_ok,
        theorem1_ok=theorem1_ok,
        light_sum=light_sum,
        lpath_sum=lpath_sum,
        bound_exact_ok=ok,
        bound_float=bound_float,
    )
