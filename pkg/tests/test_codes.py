"""Tests for preimage analysis, the degree, and the image presentation."""

import random

import pytest

from conftest import (
    FIXTURE_NAMES,
    all_words,
    brute_image_words,
    brute_periodic_image_words,
    brute_preimage_blocks,
    brute_profile,
    random_triple,
)
from factorcode import (
    Block,
    PeriodicPoint,
    PreconditionError,
    apply_code,
    backward_sets,
    d_star,
    degree,
    fixtures,
    forward_sets,
    image_blocks,
    image_irreducible,
    is_finite_to_one,
    make_sft,
    periodic_image_points,
    preimage_blocks,
    preimage_profile,
    preimage_profiles,
    sofic_image,
)
from factorcode.codes import pair_graph
from factorcode.core import FactorTriple


D_STAR_EXPECTED = {
    "fix_a": (("0",), 0, 1),
    "fix_b": (("0",), 0, 2),
    "fix_c": (("0",), 0, 2),
    "fix_d": (("0", "1"), 1, 1),
    "fix_e": (("1", "1"), 0, 2),
    "fix_g": (("1",), 0, 1),
}

FINITE_TO_ONE_EXPECTED = {
    "fix_a": True, "fix_b": True, "fix_c": False,
    "fix_d": False, "fix_e": False, "fix_g": True,
}

PRESENTATION_EXPECTED = {
    "fix_a": ("0", "1"),
    "fix_b": ("a+b",),
    "fix_c": ("0+1",),
    "fix_d": ("a+b", "c", "a", "d"),
    "fix_e": ("b+d+e", "a+c+f+g", "a+f+g"),
    "fix_g": ("p+q", "t", "p"),
}

PERIODIC_POINTS_EXPECTED = {
    "fix_a": ["0", "01", "001", "0001"],
    "fix_b": ["0"],
    "fix_c": ["0"],
    "fix_d": ["0", "01", "001", "011", "0001", "0011"],
    "fix_e": ["1", "01", "011", "0111"],
    "fix_g": ["0", "001", "0001"],
}


def test_apply_code_on_blocks_and_points():
    t = fixtures.load("fix_a")
    assert apply_code(t, Block(("0", "1", "0"), start=2)) == Block(
        ("0", "1", "0"), start=2)
    assert apply_code(t, PeriodicPoint(("0", "1"))) == PeriodicPoint(
        ("0", "1"))
    with pytest.raises(ValueError):
        apply_code(t, Block(("1", "1")))
    with pytest.raises(ValueError):
        apply_code(t, PeriodicPoint(("1",)))


def test_sweep_sets_on_a_hand_example():
    t = fixtures.load("fix_d")
    fwd = forward_sets(t, ("0", "0", "1"))
    bwd = backward_sets(t, ("0", "0", "1"))
    assert [set(s) for s in fwd] == [{"a", "b"}, {"a", "b"}, {"c"}]
    assert [set(s) for s in bwd] == [{"a", "b"}, {"a", "b"}, {"c", "d"}]
    profiles = preimage_profiles(t, ("0", "0", "1"))
    assert [p.symbols for p in profiles] == [f & b for f, b in zip(fwd, bwd)]
    assert preimage_blocks(t, ("0", "0", "1")) == [
        ("a", "a", "c"), ("a", "b", "c"), ("b", "b", "c")]


def test_preimage_blocks_match_brute_enumeration():
    for name in FIXTURE_NAMES:
        t = fixtures.load(name)
        for n in (1, 2, 3, 4):
            for word in sorted(brute_image_words(t, n)):
                got = preimage_blocks(t, word)
                want = brute_preimage_blocks(t, word)
                xorder = {s: i for i, s in enumerate(t.x.symbols)}
                assert sorted(got) == sorted(want)
                assert got == sorted(
                    got, key=lambda u: tuple(xorder[s] for s in u))


def test_profiles_match_brute_enumeration():
    for name in FIXTURE_NAMES:
        t = fixtures.load(name)
        for n in (1, 2, 3, 4):
            for word in sorted(brute_image_words(t, n)):
                for i in range(n):
                    assert preimage_profile(t, word, i).symbols == \
                        brute_profile(t, word, i)


def test_profile_of_word_outside_language_is_empty():
    t = fixtures.load("fix_a")
    assert preimage_profile(t, ("1", "1"), 0).symbols == frozenset()
    with pytest.raises(ValueError, match="unknown image symbol"):
        preimage_profiles(t, ("1", "z"))
    with pytest.raises(ValueError):
        preimage_profiles(t, ())
    with pytest.raises(ValueError, match="index"):
        preimage_profile(t, ("0",), 3)


def test_symbol_separation_on_a_two_point_fiber():
    t = fixtures.load("fix_b")
    for n in (2, 4, 6):
        word = ("0",) * n
        blocks = preimage_blocks(t, word)
        assert len(blocks) == 2
        u, v = blocks
        assert all(u[i] != v[i] for i in range(n))


def test_d_star_frozen_values_and_witness_profiles():
    for name, (word, index, value) in D_STAR_EXPECTED.items():
        t = fixtures.load(name)
        w = d_star(t)
        assert (w.word, w.index, w.value) == (word, index, value)
        assert len(preimage_profile(t, w.word, w.index).symbols) == value


def test_d_star_is_a_global_minimum_at_desk_scale():
    rng = random.Random(23)
    triples = [fixtures.load(name) for name in FIXTURE_NAMES]
    triples += [random_triple(rng) for _ in range(25)]
    for t in triples:
        w = d_star(t)
        horizon = min(len(w.word) + 2, 6)
        floor = min(
            len(brute_profile(t, word, i))
            for n in range(1, horizon + 1)
            for word in brute_image_words(t, n)
            for i in range(n)
            if brute_profile(t, word, i))
        assert w.value == floor
        assert len(brute_profile(t, w.word, w.index)) == w.value


def test_pair_graph_shape():
    t = fixtures.load("fix_b")
    pg = pair_graph(t)
    assert set(pg.vertices) == {("a", "a"), ("a", "b"), ("b", "a"),
                                ("b", "b")}
    assert set(pg.edges) == {(("a", "a"), ("b", "b")),
                             (("b", "b"), ("a", "a")),
                             (("a", "b"), ("b", "a")),
                             (("b", "a"), ("a", "b"))}
    sizes = {name: (len(pair_graph(fixtures.load(name)).vertices),
                    len(pair_graph(fixtures.load(name)).edges))
             for name in FIXTURE_NAMES}
    assert sizes == {"fix_a": (2, 3), "fix_b": (4, 4), "fix_c": (4, 16),
                     "fix_d": (8, 18), "fix_e": (25, 50), "fix_g": (5, 6)}


def test_finite_to_one_frozen_and_diamond_free():
    for name, expected in FINITE_TO_ONE_EXPECTED.items():
        t = fixtures.load(name)
        assert is_finite_to_one(t) == expected


def diamond_up_to(t, max_len):
    """Two distinct equally labeled words with equal endpoints."""
    for n in range(2, max_len + 1):
        seen = {}
        for u in all_words(t.x, n):
            key = (t.label_word(u), u[0], u[-1])
            if key in seen and seen[key] != u:
                return True
            seen[key] = u
    return False


def test_finite_to_one_claims_imply_no_short_diamond():
    rng = random.Random(29)
    triples = [fixtures.load(name) for name in FIXTURE_NAMES]
    triples += [random_triple(rng) for _ in range(40)]
    for t in triples:
        if is_finite_to_one(t):
            assert not diamond_up_to(t, 7)
        else:
            assert diamond_up_to(t, 2 * len(t.x.symbols) ** 2 + 2)


def test_degree_frozen_values():
    assert degree(fixtures.load("fix_a")) == 1
    assert degree(fixtures.load("fix_b")) == 2
    assert degree(fixtures.load("fix_g")) == 1
    with pytest.raises(PreconditionError, match="infinite-to-one"):
        degree(fixtures.load("fix_c"))


def test_degree_strict_requires_irreducible_domain():
    x = make_sft(("a", "b", "c", "d"),
                 [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")])
    t = FactorTriple(x, {"a": "0", "b": "1", "c": "0", "d": "1"},
                     ("0", "1"))
    assert is_finite_to_one(t)
    assert degree(t) == 2
    with pytest.raises(PreconditionError, match="domain shift"):
        degree(t, strict=True)


def test_degree_needs_certified_irreducible_image():
    x = make_sft(("a", "b"), [("a", "a"), ("a", "b"), ("b", "b")])
    t = FactorTriple(x, {"a": "0", "b": "1"}, ("0", "1"))
    assert is_finite_to_one(t)
    assert not image_irreducible(t)
    with pytest.raises(PreconditionError, match="image shift"):
        degree(t)


def test_presentation_shape_frozen():
    for name, states in PRESENTATION_EXPECTED.items():
        image = sofic_image(fixtures.load(name))
        assert image.triple.x.symbols == states
        assert image.irreducible


def test_presentation_is_right_resolving_and_label_homogeneous():
    rng = random.Random(31)
    triples = [fixtures.load(name) for name in FIXTURE_NAMES]
    triples += [random_triple(rng) for _ in range(25)]
    for t in triples:
        image = sofic_image(t)
        pres = image.triple
        for state in pres.x.symbols:
            members = image.members[state]
            assert len({t.label[s] for s in members}) == 1
            labels = [pres.label[u] for u in pres.x.successors(state)]
            assert len(labels) == len(set(labels))
            for nxt in pres.x.successors(state):
                grown = {u for s in members for u in t.x.successors(s)
                         if t.label[u] == pres.label[nxt]}
                assert grown == set(image.members[nxt])


def test_presentation_language_equals_image_language():
    rng = random.Random(37)
    triples = [fixtures.load(name) for name in FIXTURE_NAMES]
    triples += [random_triple(rng) for _ in range(25)]
    for t in triples:
        pres = sofic_image(t).triple
        for n in (1, 2, 3, 4):
            presented = {pres.label_word(u) for u in all_words(pres.x, n)}
            assert presented == brute_image_words(t, n)


def test_image_blocks_sorted_in_image_alphabet_order():
    for name in FIXTURE_NAMES:
        t = fixtures.load(name)
        yorder = {c: i for i, c in enumerate(t.y_alphabet)}
        for n in (1, 2, 3, 4):
            got = image_blocks(t, n)
            assert set(got) == brute_image_words(t, n)
            assert got == sorted(
                got, key=lambda w: tuple(yorder[c] for c in w))
    with pytest.raises(ValueError):
        image_blocks(fixtures.load("fix_a"), 0)


def test_periodic_image_points_frozen_and_brute_checked():
    for name, words in PERIODIC_POINTS_EXPECTED.items():
        t = fixtures.load(name)
        pts = periodic_image_points(t, 4)
        assert [''.join(p.word) for p in pts] == words
        assert {p.word for p in pts} == brute_periodic_image_words(t, 4)
    with pytest.raises(ValueError):
        periodic_image_points(fixtures.load("fix_a"), 0)


def test_periodic_image_points_on_random_triples():
    rng = random.Random(41)
    for _ in range(25):
        t = random_triple(rng)
        got = {p.word for p in periodic_image_points(t, 3)}
        assert got == brute_periodic_image_words(t, 3)
