"""Input format parsers and canonical output documents."""

import json

import pytest

from bisimkit.engine import refine_hopcroft, refine_naive
from bisimkit.formats import (
    FormatError,
    detect_format,
    dump_coalgebra,
    load_coalgebra,
    partition_to_json,
    tree_from_json,
    tree_to_json,
)
from bisimkit.gen import GenSpec, generate
from bisimkit.oracle import bisim_bruteforce
from bisimkit.wtree import audit_tree


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# -- dfa-text --------------------------------------------------------------------


def test_dfa_text_two_selfloops(tmp_path):
    path = write(tmp_path, "m.dfa", "dfa 2 1\n1 0\n1 1\n")
    c = load_coalgebra(path, "dfa-text")
    assert c.n_states == 2
    # both states accepting with self-loops: everything collapses
    assert refine_naive(c).partition.blocks == ((0, 1),)
    assert bisim_bruteforce(c).blocks == ((0, 1),)


def test_dfa_text_bad_header(tmp_path):
    path = write(tmp_path, "m.dfa", "nfa 2 1\n1 0\n1 1\n")
    with pytest.raises(FormatError):
        load_coalgebra(path, "dfa-text")


def test_dfa_text_successor_out_of_range(tmp_path):
    path = write(tmp_path, "m.dfa", "dfa 2 1\n1 0\n1 9\n")
    with pytest.raises(FormatError) as e:
        load_coalgebra(path, "dfa-text")
    assert e.value.line == 3


def test_dfa_text_wrong_field_count(tmp_path):
    path = write(tmp_path, "m.dfa", "dfa 1 2\n1 0\n")
    with pytest.raises(FormatError):
        load_coalgebra(path, "dfa-text")


# -- aut -------------------------------------------------------------------------


def test_aut_basic(tmp_path):
    text = 'des (0, 3, 3)\n(0, "a", 1)\n(1, b, 2)\n(2, "a", 0)\n'
    c = load_coalgebra(write(tmp_path, "m.aut", text), "aut")
    assert c.n_states == 3
    from bisimkit.functors import render_functor

    assert render_functor(c.functor) == "P ({a,b} * X)"


def test_aut_no_transitions_all_bisimilar(tmp_path):
    c = load_coalgebra(write(tmp_path, "m.aut", "des (0, 0, 4)\n"), "aut")
    assert c.n_states == 4
    assert refine_naive(c).partition.blocks == ((0, 1, 2, 3),)


def test_aut_bad_transition_line(tmp_path):
    text = 'des (0, 1, 2)\n(0 -> 1)\n'
    with pytest.raises(FormatError) as e:
        load_coalgebra(write(tmp_path, "m.aut", text), "aut")
    assert e.value.line == 2


def test_aut_transition_count_mismatch(tmp_path):
    text = 'des (0, 2, 2)\n(0, "a", 1)\n'
    with pytest.raises(FormatError):
        load_coalgebra(write(tmp_path, "m.aut", text), "aut")


# -- mc-tsv ----------------------------------------------------------------------


def test_mc_tsv_basic(tmp_path):
    text = "0 1 1/2\n0 0 1/2\n1 1 1/1\n"
    c = load_coalgebra(write(tmp_path, "m.tsv", text), "mc-tsv")
    assert c.n_states == 2
    assert refine_naive(c).partition.blocks == ((0, 1),)


def test_mc_tsv_bad_sum(tmp_path):
    text = "0 1 1/2\n1 0 1/1\n"
    with pytest.raises(FormatError) as e:
        load_coalgebra(write(tmp_path, "m.tsv", text), "mc-tsv")
    assert "sum" in str(e.value)


def test_mc_tsv_missing_state_rows(tmp_path):
    # state 1 appears as a target but has no outgoing mass
    text = "0 1 1/1\n"
    with pytest.raises(FormatError):
        load_coalgebra(write(tmp_path, "m.tsv", text), "mc-tsv")


# -- coalg-json ------------------------------------------------------------------


def test_coalg_json_round_trip_is_identity(tmp_path):
    for fam in ("dfa", "nfa", "lts", "mc", "mdp"):
        c = generate(GenSpec(fam, 7, seed=11))
        doc = dump_coalgebra(c)
        path = write(tmp_path, f"{fam}.json", doc)
        c2 = load_coalgebra(path, "coalg-json")
        assert dump_coalgebra(c2) == doc


def test_coalg_json_bad_document(tmp_path):
    with pytest.raises(FormatError):
        load_coalgebra(write(tmp_path, "x.json", "{"), "coalg-json")
    with pytest.raises(FormatError):
        load_coalgebra(write(tmp_path, "y.json", '{"functor": "X"}'), "coalg-json")


def test_detect_format():
    assert detect_format("a.json") == "coalg-json"
    assert detect_format("a.dfa") == "dfa-text"
    assert detect_format("a.aut") == "aut"
    assert detect_format("a.tsv") == "mc-tsv"
    with pytest.raises(FormatError):
        detect_format("a.xyz")


# -- outputs ---------------------------------------------------------------------


def test_partition_json_deterministic():
    c = generate(GenSpec("dfa", 30, seed=3))
    a = partition_to_json(refine_hopcroft(c, "card").partition)
    b = partition_to_json(refine_hopcroft(c, "card").partition)
    assert a == b
    obj = json.loads(a)
    firsts = [blk[0] for blk in obj["blocks"]]
    assert firsts == sorted(firsts)  # blocks ordered by smallest member
    for blk in obj["blocks"]:
        assert blk == sorted(blk)


def test_tree_json_round_trip_audits():
    c = generate(GenSpec("lts", 15, seed=21))
    r = refine_hopcroft(c, "pred")
    doc = tree_to_json(r.tree)
    tree, weights, heavy = tree_from_json(doc)
    assert weights == list(r.tree.weight)
    assert heavy == r.tree.heavy_choice()
    assert audit_tree(tree, weights, heavy).all_ok()


def test_tree_from_json_rejects_bad_documents():
    with pytest.raises(FormatError):
        tree_from_json("{]")
    with pytest.raises(FormatError):
        tree_from_json('{"parent": [0, 0]}')
    with pytest.raises(FormatError):
        tree_from_json('{"parent": [0, 1], "w": [1, 1]}')  # two roots
    with pytest.raises(FormatError):
        tree_from_json('{"parent": [0], "w": [1], "heavy": [null, null]}')
