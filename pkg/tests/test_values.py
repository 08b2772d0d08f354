"""Value validation, canonical forms, signatures, JSON codec."""

from fractions import Fraction

import pytest

from bisimkit.functors import parse_functor
from bisimkit.values import (
    DistVal,
    FunVal,
    InjVal,
    Label,
    ProbabilitySumError,
    SetVal,
    ShapeMismatchError,
    StateRangeError,
    StateRef,
    TupleVal,
    UnknownLabelError,
    occurring_states,
    signature_of,
    value_from_obj,
    value_to_obj,
    validate_value,
)

DX = parse_functor("D X")
DFA = parse_functor("{0,1} * (X ^ {a,b})")
PX = parse_functor("P X")


def dist(*pairs):
    return DistVal(tuple((StateRef(i), Fraction(p)) for i, p in pairs))


def dfa_val(bit, sa, sb):
    return TupleVal((Label(bit), FunVal((("a", StateRef(sa)), ("b", StateRef(sb))))))


# -- canonical construction ------------------------------------------------------


def test_set_members_dedupe_and_sort():
    s = SetVal((StateRef(4), StateRef(1), StateRef(4)))
    assert s.members == (StateRef(1), StateRef(4))
    assert s == SetVal((StateRef(1), StateRef(4), StateRef(1)))


def test_dist_zero_entries_dropped_and_merged():
    d = DistVal(
        (
            (StateRef(1), Fraction(1, 2)),
            (StateRef(0), Fraction(0)),
            (StateRef(1), Fraction(1, 2)),
        )
    )
    assert d.entries == ((StateRef(1), Fraction(1)),)


def test_fun_entries_sorted_by_label():
    f = FunVal((("b", StateRef(0)), ("a", StateRef(1))))
    assert [k for k, _ in f.entries] == ["a", "b"]
    assert f == FunVal((("a", StateRef(1)), ("b", StateRef(0))))


# -- validate_value --------------------------------------------------------------


def test_validate_distribution_ok():
    validate_value(DX, dist((0, "1/2"), (1, "1/2")), 2)


def test_validate_distribution_bad_sum():
    with pytest.raises(ProbabilitySumError):
        validate_value(DX, dist((0, "1/2"), (1, "1/3")), 2)


def test_validate_unknown_label():
    with pytest.raises(UnknownLabelError):
        validate_value(DFA, dfa_val("2", 0, 0), 1)


def test_validate_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        validate_value(DFA, StateRef(0), 1)


def test_validate_state_out_of_range():
    with pytest.raises(StateRangeError):
        validate_value(PX, SetVal((StateRef(5),)), 3)


def test_validate_fun_labels_must_match_exponent():
    bad = TupleVal((Label("0"), FunVal((("a", StateRef(0)),))))
    with pytest.raises(ShapeMismatchError):
        validate_value(DFA, bad, 1)
    extra = TupleVal(
        (Label("0"), FunVal((("a", StateRef(0)), ("b", StateRef(0)), ("c", StateRef(0)))))
    )
    with pytest.raises(UnknownLabelError):
        validate_value(DFA, extra, 1)


def test_validate_injection():
    f = parse_functor("X + {stop}")
    validate_value(f, InjVal(0, StateRef(1)), 2)
    validate_value(f, InjVal(1, Label("stop")), 2)
    with pytest.raises(ShapeMismatchError):
        validate_value(f, InjVal(2, Label("stop")), 2)


# -- signatures ------------------------------------------------------------------


def test_signature_powerset_dedupes_blocks():
    blocks = {1: 0, 2: 0, 4: 2}
    v = SetVal((StateRef(1), StateRef(2), StateRef(4)))
    assert signature_of(PX, v, blocks) == (0, 2)


def test_signature_distribution_merges_blocks():
    blocks = {1: 0, 2: 0, 4: 2}
    v = dist((1, "1/2"), (2, "1/4"), (4, "1/4"))
    assert signature_of(DX, v, blocks) == ((0, Fraction(3, 4)), (2, Fraction(1, 4)))


def test_signature_dfa_same_block_successors():
    blocks = [0, 1, 1]
    a = dfa_val("1", 1, 2)
    b = dfa_val("1", 2, 1)
    assert signature_of(DFA, a, blocks) == ("1", (1, 1))
    assert signature_of(DFA, a, blocks) == signature_of(DFA, b, blocks)
    c = dfa_val("0", 1, 2)
    assert signature_of(DFA, c, blocks) != signature_of(DFA, a, blocks)


def test_signature_verdicts_survive_block_renaming():
    # only equality of signatures matters; renaming block labels with the
    # same kernel must not change any verdict
    vs = [dfa_val("0", 0, 1), dfa_val("0", 1, 0), dfa_val("1", 2, 2), dfa_val("0", 0, 2)]
    b1 = [0, 0, 1]
    b2 = [7, 7, 3]  # same kernel, different names
    for x in vs:
        for y in vs:
            eq1 = signature_of(DFA, x, b1) == signature_of(DFA, y, b1)
            eq2 = signature_of(DFA, x, b2) == signature_of(DFA, y, b2)
            assert eq1 == eq2


def test_signature_refinement_never_merges():
    coarse = [0, 0, 0]
    fine = [0, 1, 0]  # refines coarse
    vs = [SetVal((StateRef(0),)), SetVal((StateRef(1),)), SetVal((StateRef(0), StateRef(2)))]
    for x in vs:
        for y in vs:
            if signature_of(PX, x, fine) == signature_of(PX, y, fine):
                assert signature_of(PX, x, coarse) == signature_of(PX, y, coarse)


def test_signature_pure_distribution_all_equal():
    # any state of a plain-distribution system looks the same under one block
    one_block = [0, 0, 0]
    d1 = dist((0, "1/2"), (1, "1/2"))
    d2 = dist((2, 1))
    assert signature_of(DX, d1, one_block) == signature_of(DX, d2, one_block)


# -- occurring_states ------------------------------------------------------------


def test_occurring_empty_set():
    assert occurring_states(PX, SetVal(())) == set()


def test_occurring_distribution():
    assert occurring_states(DX, dist((2, 1))) == {2}


def test_occurring_shared_target_counted_once():
    v = TupleVal((Label("1"), FunVal((("a", StateRef(3)), ("b", StateRef(3))))))
    assert occurring_states(DFA, v) == {3}


def test_constant_value_signature_is_block_independent():
    v = SetVal((TupleVal((Label("a"), StateRef(0))),))
    w = SetVal(())
    f = parse_functor("P ({a} * X)")
    assert occurring_states(f, w) == set()
    assert signature_of(f, w, [0]) == signature_of(f, w, [99])
    assert occurring_states(f, v) == {0}


# -- JSON codec ------------------------------------------------------------------


@pytest.mark.parametrize(
    "v",
    [
        StateRef(3),
        Label("go"),
        dfa_val("1", 0, 2),
        InjVal(1, Label("stop")),
        SetVal((StateRef(0), TupleVal((Label("a"), StateRef(1))))),
        dist((0, "1/3"), (1, "2/3")),
        SetVal((dist((0, "1/2"), (1, "1/2")), dist((2, 1)))),
    ],
)
def test_value_json_round_trip(v):
    assert value_from_obj(value_to_obj(v)) == v


def test_dist_json_uses_num_den_strings():
    obj = value_to_obj(dist((0, "1/2"), (1, "1/2")))
    assert obj == {"dist": [[{"x": 0}, "1/2"], [{"x": 1}, "1/2"]]}


def test_value_from_obj_rejects_junk():
    from bisimkit.values import InvalidValueError

    with pytest.raises(InvalidValueError):
        value_from_obj({"weird": 1})
    with pytest.raises(InvalidValueError):
        value_from_obj({"dist": [[{"x": 0}, "1/0"]]})
    with pytest.raises(InvalidValueError):
        value_from_obj({"x": "zero"})
