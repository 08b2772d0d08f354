"""Functor grammar: parsing, precedence, rendering round trips."""

import pytest

from bisimkit.functors import (
    ConstSet,
    Coproduct,
    Distribution,
    Exponent,
    FunctorSyntaxError,
    Identity,
    Powerset,
    Product,
    is_rigid,
    parse_functor,
    render_functor,
)


def test_parse_identity():
    assert parse_functor("X") == Identity()


def test_parse_dfa_functor():
    expr = parse_functor("{0,1} * (X ^ {a,b})")
    assert expr == Product((ConstSet(("0", "1")), Exponent(Identity(), ("a", "b"))))


def test_parse_lts_functor():
    expr = parse_functor("P ({a,b} * X)")
    assert expr == Powerset(Product((ConstSet(("a", "b")), Identity())))


def test_parse_markov_functor():
    assert parse_functor("D X") == Distribution(Identity())


def test_parse_mdp_functor():
    assert parse_functor("P D X") == Powerset(Distribution(Identity()))


def test_star_binds_tighter_than_plus():
    expr = parse_functor("X + X * X")
    assert expr == Coproduct((Identity(), Product((Identity(), Identity()))))


def test_prefix_binds_tighter_than_star():
    expr = parse_functor("P {a} * X")
    assert expr == Product((Powerset(ConstSet(("a",))), Identity()))


def test_exponent_binds_tighter_than_prefix():
    assert parse_functor("P X ^ {a}") == Powerset(Exponent(Identity(), ("a",)))


def test_parenthesized_powerset_under_exponent():
    expr = parse_functor("(P X) ^ {a,b}")
    assert expr == Exponent(Powerset(Identity()), ("a", "b"))


def test_products_and_sums_flatten():
    assert parse_functor("X * X * X") == Product((Identity(),) * 3)
    assert parse_functor("X + X + X") == Coproduct((Identity(),) * 3)


def test_numeric_and_underscore_labels():
    assert parse_functor("{0,1,go_fast}") == ConstSet(("0", "1", "go_fast"))


def test_syntax_error_reports_position():
    with pytest.raises(FunctorSyntaxError) as e:
        parse_functor("X * ")
    assert e.value.position == 4


def test_empty_label_set_rejected():
    with pytest.raises(FunctorSyntaxError):
        parse_functor("{}")


def test_duplicate_label_rejected():
    with pytest.raises(FunctorSyntaxError):
        parse_functor("{a,a}")


def test_trailing_garbage_rejected():
    with pytest.raises(FunctorSyntaxError):
        parse_functor("X X")


def test_unknown_name_rejected():
    with pytest.raises(FunctorSyntaxError):
        parse_functor("Q")


@pytest.mark.parametrize(
    "text",
    [
        "X",
        "{0,1} * (X ^ {a,b})",
        "P ({a,b} * X)",
        "D X",
        "P D X",
        "(P X) ^ {a}",
        "X + {stop} + X * X",
        "D (X + {win,lose})",
        "{0,1} * ((P X) ^ {a,b,c})",
    ],
)
def test_render_parse_round_trip(text):
    expr = parse_functor(text)
    rendered = render_functor(expr)
    assert parse_functor(rendered) == expr
    # rendering is a fixpoint: canonical text re-renders to itself
    assert render_functor(parse_functor(rendered)) == rendered


def test_is_rigid():
    assert is_rigid(parse_functor("{0,1} * (X ^ {a,b})"))
    assert is_rigid(parse_functor("X + {stop}"))
    assert not is_rigid(parse_functor("P ({a} * X)"))
    assert not is_rigid(parse_functor("D X"))
    assert not is_rigid(parse_functor("{0,1} * ((P X) ^ {a})"))
