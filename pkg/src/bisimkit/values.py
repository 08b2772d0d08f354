"""Per-state observation values: validation, canonical forms, signatures.

A value mirrors the shape of its governing functor expression: state
references for ``X``, labels for constant sets, tuples, tagged injections,
label-indexed maps for exponents, finite sets, and exact-rational finite
distributions.  Sets and distributions are canonicalized at construction
(sorted, duplicates removed or merged), so structural equality of values is
plain ``==``.

The *signature* of a value under a block labelling replaces every state
reference by its block label and re-canonicalizes.  Two states are related
by one refinement step of the induced equivalence exactly when their
signatures are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .functors import (
    ConstSet,
    Coproduct,
    Distribution,
    Exponent,
    FunctorExpr,
    Identity,
    Powerset,
    Product,
)

__all__ = [
    "FValue",
    "StateRef",
    "Label",
    "TupleVal",
    "InjVal",
    "FunVal",
    "SetVal",
    "DistVal",
    "InvalidValueError",
    "ShapeMismatchError",
    "UnknownLabelError",
    "ProbabilitySumError",
    "StateRangeError",
    "validate_value",
    "signature_of",
    "occurring_states",
    "structure_key",
    "value_to_obj",
    "value_from_obj",
    "map_state_refs",
]


class InvalidValueError(ValueError):
    """Base for all value-validation failures."""


class ShapeMismatchError(InvalidValueError):
    pass


class UnknownLabelError(InvalidValueError):
    pass


class ProbabilitySumError(InvalidValueError):
    pass


class StateRangeError(InvalidValueError):
    pass


@dataclass(frozen=True)
class StateRef:
    index: int


@dataclass(frozen=True)
class Label:
    name: str


@dataclass(frozen=True)
class TupleVal:
    items: tuple["FValue", ...]


@dataclass(frozen=True)
class InjVal:
    tag: int
    value: "FValue"


@dataclass(frozen=True)
class FunVal:
    """Label-indexed values, stored sorted by label name."""

    entries: tuple[tuple[str, "FValue"], ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda e: e[0]))
        object.__setattr__(self, "entries", ordered)

    def get(self, label: str) -> "FValue":
        for k, v in self.entries:
            if k == label:
                return v
        raise KeyError(label)


@dataclass(frozen=True)
class SetVal:
    """A finite set of values; members deduplicated and kept sorted."""

    members: tuple["FValue", ...]

    def __post_init__(self):
        keyed = {structure_key(m): m for m in self.members}
        ordered = tuple(keyed[k] for k in sorted(keyed))
        object.__setattr__(self, "members", ordered)


@dataclass(frozen=True)
class DistVal:
    """A finite map value -> probability; zero entries dropped, equals merged."""

    entries: tuple[tuple["FValue", Fraction], ...]

    def __post_init__(self):
        acc: dict = {}
        vals: dict = {}
        for v, p in self.entries:
            p = Fraction(p)
            if p == 0:
                continue
            k = structure_key(v)
            acc[k] = acc.get(k, Fraction(0)) + p
            vals[k] = v
        ordered = tuple((vals[k], acc[k]) for k in sorted(acc))
        object.__setattr__(self, "entries", ordered)

    def total(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))


FValue = Union[StateRef, Label, TupleVal, InjVal, FunVal, SetVal, DistVal]


def structure_key(v: FValue):
    """A total-order key for raw values (state indices untranslated)."""
    if isinstance(v, StateRef):
        return (0, v.index)
    if isinstance(v, Label):
        return (1, v.name)
    if isinstance(v, TupleVal):
        return (2, tuple(structure_key(i) for i in v.items))
    if isinstance(v, InjVal):
        return (3, v.tag, structure_key(v.value))
    if isinstance(v, FunVal):
        return (4, tuple((k, structure_key(x)) for k, x in v.entries))
    if isinstance(v, SetVal):
        return (5, tuple(structure_key(m) for m in v.members))
    if isinstance(v, DistVal):
        return (6, tuple((structure_key(x), p) for x, p in v.entries))
    raise TypeError(f"not a value: {v!r}")


def validate_value(expr: FunctorExpr, v: FValue, n_states: int) -> None:
    """Check that ``v`` matches the shape of ``expr``; raise a typed error if not.

    Distributions must sum to exactly 1 with every probability in (0, 1];
    state references must lie below ``n_states``.
    """
    if isinstance(expr, Identity):
        if not isinstance(v, StateRef):
            raise ShapeMismatchError(f"expected a state reference, got {type(v).__name__}")
        if not 0 <= v.index < n_states:
            raise StateRangeError(f"state {v.index} out of range [0, {n_states})")
        return
    if isinstance(expr, ConstSet):
        if not isinstance(v, Label):
            raise ShapeMismatchError(f"expected a label, got {type(v).__name__}")
        if v.name not in expr.labels:
            raise UnknownLabelError(f"label {v.name!r} not in {{{','.join(expr.labels)}}}")
        return
    if isinstance(expr, Product):
        if not isinstance(v, TupleVal):
            raise ShapeMismatchError(f"expected a tuple, got {type(v).__name__}")
        if len(v.items) != len(expr.factors):
            raise ShapeMismatchError(
                f"tuple arity {len(v.items)} does not match product arity {len(expr.factors)}"
            )
        for f, item in zip(expr.factors, v.items):
            validate_value(f, item, n_states)
        return
    if isinstance(expr, Coproduct):
        if not isinstance(v, InjVal):
            raise ShapeMismatchError(f"expected an injection, got {type(v).__name__}")
        if not 0 <= v.tag < len(expr.summands):
            raise ShapeMismatchError(f"injection tag {v.tag} out of range")
        validate_value(expr.summands[v.tag], v.value, n_states)
        return
    if isinstance(expr, Exponent):
        if not isinstance(v, FunVal):
            raise ShapeMismatchError(f"expected a label-indexed map, got {type(v).__name__}")
        have = [k for k, _ in v.entries]
        want = sorted(expr.labels)
        if have != want:
            extra = set(have) - set(expr.labels)
            if extra:
                raise UnknownLabelError(f"label {sorted(extra)[0]!r} not in exponent index")
            raise ShapeMismatchError(
                f"map covers labels {have}, exponent requires {want}"
            )
        for _, item in v.entries:
            validate_value(expr.base, item, n_states)
        return
    if isinstance(expr, Powerset):
        if not isinstance(v, SetVal):
            raise ShapeMismatchError(f"expected a set, got {type(v).__name__}")
        for m in v.members:
            validate_value(expr.inner, m, n_states)
        return
    if isinstance(expr, Distribution):
        if not isinstance(v, DistVal):
            raise ShapeMismatchError(f"expected a distribution, got {type(v).__name__}")
        for x, p in v.entries:
            if not 0 < p <= 1:
                raise ProbabilitySumError(f"probability {p} outside (0, 1]")
            validate_value(expr.inner, x, n_states)
        total = v.total()
        if total != 1:
            raise ProbabilitySumError(f"distribution sums to {total}, expected 1")
        return
    raise TypeError(f"not a functor expression: {expr!r}")


def signature_of(expr: FunctorExpr, v: FValue, block_of) -> object:
    """Canonical form of ``v`` with each state replaced by its block label.

    ``block_of`` maps state index -> block label (any sortable, hashable
    value); a sequence indexed by state works.  Signatures are nested tuples:
    equal signatures mean the two values are indistinguishable by one
    observation step under the given block structure.  ``expr`` documents the
    intended shape; the computation is value-directed.
    """
    del expr
    return _sig(v, block_of)


def _sig(v: FValue, block_of):
    if isinstance(v, StateRef):
        return block_of[v.index]
    if isinstance(v, Label):
        return v.name
    if isinstance(v, TupleVal):
        return tuple(_sig(i, block_of) for i in v.items)
    if isinstance(v, InjVal):
        return (v.tag, _sig(v.value, block_of))
    if isinstance(v, FunVal):
        return tuple(_sig(x, block_of) for _, x in v.entries)
    if isinstance(v, SetVal):
        return tuple(sorted({_sig(m, block_of) for m in v.members}))
    if isinstance(v, DistVal):
        acc: dict = {}
        for x, p in v.entries:
            s = _sig(x, block_of)
            acc[s] = acc.get(s, Fraction(0)) + p
        return tuple(sorted(acc.items()))
    raise TypeError(f"not a value: {v!r}")


def occurring_states(expr: FunctorExpr, v: FValue) -> set[int]:
    """All state indices referenced anywhere inside ``v``."""
    del expr
    out: set[int] = set()
    _collect_states(v, out)
    return out


def _collect_states(v: FValue, out: set[int]) -> None:
    if isinstance(v, StateRef):
        out.add(v.index)
    elif isinstance(v, TupleVal):
        for i in v.items:
            _collect_states(i, out)
    elif isinstance(v, InjVal):
        _collect_states(v.value, out)
    elif isinstance(v, FunVal):
        for _, x in v.entries:
            _collect_states(x, out)
    elif isinstance(v, SetVal):
        for m in v.members:
            _collect_states(m, out)
    elif isinstance(v, DistVal):
        for x, _ in v.entries:
            _collect_states(x, out)


def map_state_refs(v: FValue, f) -> FValue:
    """Rebuild ``v`` with every state index replaced by ``f(index)``.

    Sets and distributions re-canonicalize, so merging under a coarser
    target index space happens automatically.
    """
    if isinstance(v, StateRef):
        return StateRef(f(v.index))
    if isinstance(v, Label):
        return v
    if isinstance(v, TupleVal):
        return TupleVal(tuple(map_state_refs(i, f) for i in v.items))
    if isinstance(v, InjVal):
        return InjVal(v.tag, map_state_refs(v.value, f))
    if isinstance(v, FunVal):
        return FunVal(tuple((k, map_state_refs(x, f)) for k, x in v.entries))
    if isinstance(v, SetVal):
        return SetVal(tuple(map_state_refs(m, f) for m in v.members))
    if isinstance(v, DistVal):
        return DistVal(tuple((map_state_refs(x, f), p) for x, p in v.entries))
    raise TypeError(f"not a value: {v!r}")


# -- JSON encoding -------------------------------------------------------------
#
#   StateRef  {"x": i}
#   Label     "a"
#   TupleVal  [...]
#   InjVal    {"inj": k, "val": v}
#   FunVal    {"fun": {"a": v, ...}}
#   SetVal    {"set": [...]}
#   DistVal   {"dist": [[v, "num/den"], ...]}


def value_to_obj(v: FValue):
    if isinstance(v, StateRef):
        return {"x": v.index}
    if isinstance(v, Label):
        return v.name
    if isinstance(v, TupleVal):
        return [value_to_obj(i) for i in v.items]
    if isinstance(v, InjVal):
        return {"inj": v.tag, "val": value_to_obj(v.value)}
    if isinstance(v, FunVal):
        return {"fun": {k: value_to_obj(x) for k, x in v.entries}}
    if isinstance(v, SetVal):
        return {"set": [value_to_obj(m) for m in v.members]}
    if isinstance(v, DistVal):
        return {"dist": [[value_to_obj(x), f"{p.numerator}/{p.denominator}"] for x, p in v.entries]}
    raise TypeError(f"not a value: {v!r}")


def _parse_fraction(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidValueError(f"probability must be a 'num/den' string, got {text!r}")
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidValueError(f"bad probability {text!r}: {e}") from None
    return f


def value_from_obj(obj) -> FValue:
    """Decode the JSON form of a value; raises InvalidValueError on bad input."""
    if isinstance(obj, str):
        return Label(obj)
    if isinstance(obj, list):
        return TupleVal(tuple(value_from_obj(i) for i in obj))
    if isinstance(obj, dict):
        if "x" in obj:
            if not isinstance(obj["x"], int) or isinstance(obj["x"], bool):
                raise InvalidValueError(f"state reference must be an integer: {obj!r}")
            return StateRef(obj["x"])
        if "inj" in obj:
            return InjVal(obj["inj"], value_from_obj(obj["val"]))
        if "fun" in obj:
            return FunVal(tuple((k, value_from_obj(x)) for k, x in obj["fun"].items()))
        if "set" in obj:
            return SetVal(tuple(value_from_obj(m) for m in obj["set"]))
        if "dist" in obj:
            entries = []
            for pair in obj["dist"]:
                if not isinstance(pair, list) or len(pair) != 2:
                    raise InvalidValueError(f"distribution entry must be [value, prob]: {pair!r}")
                p = _parse_fraction(pair[1])
                if p < 0:
                    raise InvalidValueError(f"negative probability {p}")
                entries.append((value_from_obj(pair[0]), p))
            return DistVal(tuple(entries))
    raise InvalidValueError(f"unrecognized value encoding: {obj!r}")
