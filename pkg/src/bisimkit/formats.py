"""File formats: coalgebra inputs, partition and refinement-tree outputs.

Input formats
  coalg-json  {"functor": "...", "states": n, "c": [...]}  (native)
  dfa-text    header ``dfa n k``; one line per state: accept bit then k
              successor ids, one per letter a, b, ...
  aut         Aldebaran: ``des (first, m, n)`` then ``(src, "label", dst)``
              triples; becomes a labelled transition system
  mc-tsv      whitespace rows ``src dst num/den``; becomes a Markov chain

Output documents are emitted in one canonical compact-JSON form so results
are byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Optional, TextIO

from .coalgebra import Coalgebra, coalgebra_from_obj, coalgebra_to_obj
from .engine import Partition, RefinementTree
from .functors import (
    ConstSet,
    Distribution,
    Exponent,
    FunctorSyntaxError,
    Identity,
    Powerset,
    Product,
    default_letters,
)
from .values import (
    DistVal,
    FunVal,
    InvalidValueError,
    Label,
    SetVal,
    StateRef,
    TupleVal,
)
from .wtree import WeightedTree

__all__ = [
    "FORMATS",
    "FormatError",
    "detect_format",
    "load_coalgebra",
    "dump_coalgebra",
    "partition_to_json",
    "tree_to_json",
    "tree_from_json",
]

FORMATS = ("coalg-json", "dfa-text", "aut", "mc-tsv")

_EXTENSIONS = {
    ".json": "coalg-json",
    ".dfa": "dfa-text",
    ".aut": "aut",
    ".tsv": "mc-tsv",
}


class FormatError(ValueError):
    """Unparsable input; carries a line number when one makes sense."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def detect_format(path: str) -> str:
    for ext, fmt in _EXTENSIONS.items():
        if path.endswith(ext):
            return fmt
    raise FormatError(
        f"cannot infer format from {path!r}; pass --format explicitly"
    )


def _json_dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


# -- coalgebra inputs -----------------------------------------------------------


def _load_coalg_json(stream: TextIO) -> Coalgebra:
    try:
        obj = json.load(stream)
    except json.JSONDecodeError as e:
        raise FormatError(f"bad JSON: {e.msg}", e.lineno) from None
    try:
        return coalgebra_from_obj(obj)
    except (InvalidValueError, FunctorSyntaxError) as e:
        raise FormatError(str(e)) from None


def _load_dfa_text(stream: TextIO) -> Coalgebra:
    lines = [
        (i + 1, line.split()) for i, line in enumerate(stream) if line.strip()
    ]
    if not lines:
        raise FormatError("empty dfa file")
    lineno, header = lines[0]
    if len(header) != 3 or header[0] != "dfa":
        raise FormatError("header must be 'dfa <states> <letters>'", lineno)
    try:
        n, k = int(header[1]), int(header[2])
    except ValueError:
        raise FormatError("header counts must be integers", lineno) from None
    if n < 1 or k < 1:
        raise FormatError("state and letter counts must be positive", lineno)
    if len(lines) - 1 != n:
        raise FormatError(f"expected {n} state lines, found {len(lines) - 1}", lineno)
    letters = default_letters(k)
    values = []
    for lineno, fields in lines[1:]:
        if len(fields) != k + 1:
            raise FormatError(f"expected accept bit and {k} successors", lineno)
        if fields[0] not in ("0", "1"):
            raise FormatError(f"accept flag must be 0 or 1, got {fields[0]!r}", lineno)
        try:
            succs = [int(f) for f in fields[1:]]
        except ValueError:
            raise FormatError("successors must be integers", lineno) from None
        for s in succs:
            if not 0 <= s < n:
                raise FormatError(f"successor {s} out of range", lineno)
        fun = FunVal(tuple((a, StateRef(s)) for a, s in zip(letters, succs)))
        values.append(TupleVal((Label(fields[0]), fun)))
    functor = Product((ConstSet(("0", "1")), Exponent(Identity(), letters)))
    return Coalgebra.make(functor, values)


_AUT_HEADER = re.compile(r"des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_AUT_EDGE = re.compile(r"\(\s*(\d+)\s*,\s*(\"[^\"]*\"|[^,]+?)\s*,\s*(\d+)\s*\)\s*$")


def _load_aut(stream: TextIO) -> Coalgebra:
    lines = [(i + 1, line.strip()) for i, line in enumerate(stream) if line.strip()]
    if not lines:
        raise FormatError("empty aut file")
    lineno, header = lines[0]
    m = _AUT_HEADER.match(header)
    if not m:
        raise FormatError("header must be 'des (first, transitions, states)'", lineno)
    n_edges, n = int(m.group(2)), int(m.group(3))
    if n < 1:
        raise FormatError("state count must be positive", lineno)
    if len(lines) - 1 != n_edges:
        raise FormatError(
            f"header promises {n_edges} transitions, found {len(lines) - 1}", lineno
        )
    edges: list[tuple[int, str, int]] = []
    labels: set[str] = set()
    for lineno, text in lines[1:]:
        m = _AUT_EDGE.match(text)
        if not m:
            raise FormatError(f"bad transition {text!r}", lineno)
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if label.startswith('"'):
            label = label[1:-1]
        if not label:
            raise FormatError("empty transition label", lineno)
        if src >= n or dst >= n:
            raise FormatError(f"state out of range in {text!r}", lineno)
        labels.add(label)
        edges.append((src, label, dst))
    # a transitionless system still needs a nonempty action alphabet
    alphabet = tuple(sorted(labels)) if labels else ("tau",)
    functor = Powerset(Product((ConstSet(alphabet), Identity())))
    per_state: list[list] = [[] for _ in range(n)]
    for src, label, dst in edges:
        per_state[src].append(TupleVal((Label(label), StateRef(dst))))
    values = [SetVal(tuple(v)) for v in per_state]
    return Coalgebra.make(functor, values)


def _load_mc_tsv(stream: TextIO) -> Coalgebra:
    rows: list[tuple[int, int, int, Fraction]] = []
    max_state = -1
    for i, line in enumerate(stream):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise FormatError("expected 'src dst num/den'", i + 1)
        try:
            src, dst = int(fields[0]), int(fields[1])
            prob = Fraction(fields[2])
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(str(e), i + 1) from None
        if src < 0 or dst < 0:
            raise FormatError("state ids must be nonnegative", i + 1)
        if prob <= 0:
            raise FormatError(f"probability must be positive, got {prob}", i + 1)
        rows.append((i + 1, src, dst, prob))
        max_state = max(max_state, src, dst)
    if max_state < 0:
        raise FormatError("empty chain file")
    n = max_state + 1
    per_state: list[list] = [[] for _ in range(n)]
    for lineno, src, dst, prob in rows:
        per_state[src].append((StateRef(dst), prob))
    values = []
    for x, entries in enumerate(per_state):
        dist = DistVal(tuple(entries))
        total = dist.total()
        if total != 1:
            raise FormatError(
                f"probabilities out of state {x} sum to {total}, expected 1"
            )
        values.append(dist)
    return Coalgebra.make(Distribution(Identity()), values)


_LOADERS = {
    "coalg-json": _load_coalg_json,
    "dfa-text": _load_dfa_text,
    "aut": _load_aut,
    "mc-tsv": _load_mc_tsv,
}


def load_coalgebra(path: str, fmt: str = "auto") -> Coalgebra:
    if fmt == "auto":
        fmt = detect_format(path)
    if fmt not in _LOADERS:
        raise FormatError(f"unknown format {fmt!r}; choose from {FORMATS}")
    with open(path, "r", encoding="utf-8") as f:
        return _LOADERS[fmt](f)


def dump_coalgebra(coalg: Coalgebra) -> str:
    """Canonical JSON text; loading it back is the identity."""
    return _json_dumps(coalgebra_to_obj(coalg))


# -- result outputs --------------------------------------------------------------


def partition_to_json(partition: Partition) -> str:
    return _json_dumps({"blocks": [list(b) for b in partition.blocks]})


def tree_to_json(tree: RefinementTree) -> str:
    return _json_dumps(
        {
            "parent": list(tree.parent),
            "w": list(tree.weight),
            "states": [list(s) for s in tree.states],
            "heavy": list(tree.heavy),
        }
    )


def tree_from_json(text: str) -> tuple[WeightedTree, list[int], Optional[dict[int, int]]]:
    """Parse a tree document into (tree, weights, recorded heavy choice)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"bad JSON: {e.msg}", e.lineno) from None
    if not isinstance(obj, dict) or "parent" not in obj or "w" not in obj:
        raise FormatError("tree document needs 'parent' and 'w' arrays")
    parent = obj["parent"]
    weights = obj["w"]
    if not isinstance(parent, list) or not isinstance(weights, list):
        raise FormatError("'parent' and 'w' must be arrays")
    if len(parent) != len(weights):
        raise FormatError("'parent' and 'w' lengths differ")
    try:
        tree = WeightedTree(parent)
    except ValueError as e:
        raise FormatError(str(e)) from None
    heavy = None
    if obj.get("heavy") is not None:
        raw = obj["heavy"]
        if not isinstance(raw, list) or len(raw) != len(parent):
            raise FormatError("'heavy' must be an array of length node-count")
        heavy = {v: h for v, h in enumerate(raw) if h is not None}
    return tree, weights, heavy
