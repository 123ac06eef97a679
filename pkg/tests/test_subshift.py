import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibfsm.subshift import (
    MOTIF,
    BlockParse,
    NotAFibonacciFactor,
    central_motif_locate,
    enumerate_subwords,
    hull_sample,
    parse_left,
    parse_right,
    subword_complexity,
)
from fibfsm.words import window

TABLE = {
    1: {"0", "1"},
    2: {"01", "10", "11"},
    3: {"010", "011", "101", "110"},
    4: {"0101", "0110", "1010", "1011", "1101"},
}


def brute_force_parses(w, blocks, prefixes=("", "1")):
    """Every split ``prefix + blocks + tail`` with ``tail`` a proper prefix of a block."""
    tails = {b[:k] for b in blocks for k in range(len(b))}
    out = []

    def rec(rest, acc, prefix):
        if rest in tails:
            out.append((prefix, tuple(acc), rest))
        for b in blocks:
            if rest.startswith(b):
                rec(rest[len(b) :], acc + [b], prefix)

    for p in prefixes:
        if w.startswith(p):
            rec(w[len(p) :], [], p)
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_subword_table(n):
    assert set(enumerate_subwords(n).words) == TABLE[n]


def test_complexity_small():
    assert subword_complexity(4) == (2, 3, 4, 5)
    assert subword_complexity(1) == (2,)


def test_complexity_law_to_25():
    assert subword_complexity(25) == tuple(range(2, 27))


def test_complexity_against_brute_force_long_window():
    # independent route: a long slice of the word, no doubling logic
    text = window(-20_000, 20_000).letters
    for n in (5, 13, 25):
        seen = {text[i : i + n] for i in range(len(text) - n + 1)}
        assert seen == set(enumerate_subwords(n).words)


def test_subword_set_json():
    d = json.loads(enumerate_subwords(2).to_json())
    assert d == {"length": 2, "count": 3, "words": ["01", "10", "11"]}


def test_enumerate_rejects_zero():
    with pytest.raises(ValueError):
        enumerate_subwords(0)


def test_hull_sample_centered():
    s = hull_sample(0, 2)
    assert s.start == -2 and s.letters == "11010"
    big = hull_sample(10**6, 3)
    assert big.letters == window(10**6 - 3, 10**6 + 3).letters and len(big) == 7


@settings(max_examples=50)
@given(st.integers(min_value=-(10**7), max_value=10**7), st.integers(min_value=1, max_value=200))
def test_hull_samples_avoid_forbidden_words(shift, h):
    letters = hull_sample(shift, h).letters
    assert "00" not in letters and "111" not in letters


def test_hull_consistency_length_10():
    known = enumerate_subwords(10).words
    rng = random.Random(7)
    for _ in range(20):
        letters = hull_sample(rng.randint(-(10**6), 10**6), 200).letters
        assert {letters[i : i + 10] for i in range(len(letters) - 9)} <= known


def test_parse_right_example():
    p = parse_right("101101011011")
    assert p == BlockParse("rightward", "", ("101", "101", "01", "101"), "1")
    assert p.text() == "101101011011"


def test_parse_right_prefix():
    p = parse_right("1101")
    assert p.prefix == "1" and p.blocks == ("101",) and p.tail == ""


@pytest.mark.parametrize("bad", ["100", "1001", "0111", "111"])
def test_parse_rejects_non_factors(bad):
    with pytest.raises(NotAFibonacciFactor):
        parse_right(bad)
    with pytest.raises(NotAFibonacciFactor):
        parse_left(bad)


def test_parse_left_example():
    p = parse_left("10110101")
    assert p.blocks == ("101", "10", "101")
    assert p.text() == "10110101"


def test_parse_left_partial_head():
    p = parse_left("0110")
    assert p.blocks == ("10",) and p.tail == "01"
    p = parse_left("01101")
    assert p.blocks == ("101",) and p.tail == "01"


def test_parse_left_suffix():
    p = parse_left("1011")
    assert p.prefix == "1" and p.blocks == ("101",)


@pytest.mark.parametrize("w", ["101101011011", "0110101101", "1101011011010"])
def test_parse_reflection(w):
    right = parse_right(w)
    left = parse_left(w[::-1])
    assert len(left.blocks) == len(right.blocks)
    assert left.blocks == tuple(b[::-1] for b in right.blocks)


def test_parse_to_json():
    d = json.loads(parse_right("1101").to_json())
    assert d == {"direction": "rightward", "prefix": "1", "blocks": ["101"], "tail": ""}


def test_parse_totality_on_hull_samples():
    rng = random.Random(11)
    for _ in range(25):
        letters = hull_sample(rng.randint(-(10**6), 10**6), 500).letters
        for parse in (parse_right(letters), parse_left(letters)):
            assert parse.text() == letters
            assert len(parse.tail) < 3


def test_parse_uniqueness_brute_force():
    for n in range(1, 13):
        for w in enumerate_subwords(n).words:
            prefixes = ("1",) if w.startswith("11") else ("",)
            found = brute_force_parses(w, ("101", "01"), prefixes)
            p = parse_right(w)
            assert found == [(p.prefix, p.blocks, p.tail)], w
            # leftward parses of w are rightward parses of its reversal with reversed blocks
            edge = ("1",) if w.endswith("11") else ("",)
            mirrored = brute_force_parses(w[::-1], tuple(b[::-1] for b in ("101", "10")), edge)
            q = parse_left(w)
            assert len(mirrored) == 1
            assert (q.prefix, q.blocks, q.tail) == (
                mirrored[0][0],
                tuple(b[::-1] for b in mirrored[0][1]),
                mirrored[0][2][::-1],
            )


def test_prefix_choice_is_a_convention():
    # without the "11" rule a word can parse both ways: 101|101 and 1|01|101
    parses = brute_force_parses("101101", ("101", "01"))
    complete = sorted((p, b) for p, b, t in parses if t == "")
    assert complete == [("", ("101", "101")), ("1", ("01", "101"))]


def test_complete_parse_unique_per_prefix():
    for n in range(1, 13):
        for w in enumerate_subwords(n).words:
            for prefix in ("", "1"):
                complete = [x for x in brute_force_parses(w, ("101", "01"), (prefix,)) if x[2] == ""]
                assert len(complete) <= 1


def test_central_motif():
    start = central_motif_locate()
    assert window(start, start + 13).letters == MOTIF
    assert MOTIF == "101" + "101" + "01" + "101" + "101" and len(MOTIF) == 14
    text = window(1, 10_000).letters
    assert text.count(MOTIF) > 0


def test_motif_not_at_minus_six():
    # v_{-6}..v_7 of the canonical word is 01101101011010
    assert window(-6, 7).letters == "01101101011010"
    near = window(-19, 19).letters
    hits = [i - 19 for i in range(len(near)) if near.startswith(MOTIF, i)]
    assert hits == [-12, 1]
