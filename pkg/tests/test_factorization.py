import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cwforge.errors import InputError
from cwforge.factorization import (Node, build_forest, build_forest_greedy, dump_forest, leaf_positions,
                                   parse_forest, verify_forest)

import oracles
import semigroups as S


def test_length_one_is_a_leaf():
    f = build_forest(["e"], S.Z2_ZERO)
    assert f.root.kind == "leaf" and f.depth == 1


def test_constant_idempotent_run_is_one_node():
    f = build_forest(["z"] * 9, S.Z2_ZERO)
    assert f.root.kind == "idempotent" and len(f.root.children) == 9 and f.depth == 2


def test_empty_sequence_rejected():
    with pytest.raises(InputError):
        build_forest([], S.Z3)
    with pytest.raises(InputError):
        build_forest_greedy([], S.Z3)


def test_non_associative_product_rejected():
    with pytest.raises(InputError):
        build_forest([0, 1, 2, 1], S.NOT_ASSOC)


def test_verify_catches_bad_idempotent_node():
    bad = Node("idempotent", "g", (Node("leaf", "g", (), 0), Node("leaf", "g", (), 1)))
    chk = verify_forest(bad, ["g", "g"], S.Z2_ZERO)
    assert not chk and "idempotent" in chk.message


def test_verify_catches_swapped_leaves():
    images = ["e", "g", "z"]
    f = build_forest(images, S.Z2_ZERO)
    leaves = []
    stack = [f.root]
    while stack:
        n = stack.pop()
        if n.kind == "leaf":
            leaves.append(n)
        stack.extend(n.children)
    a, b = leaves[0], leaves[1]
    a.pos, b.pos = b.pos, a.pos
    assert not verify_forest(f.root, images, S.Z2_ZERO)


def test_verify_catches_wrong_image():
    f = build_forest(["g", "g", "g"], S.Z2_ZERO)
    f.root.image = "z"
    chk = verify_forest(f.root, ["g", "g", "g"], S.Z2_ZERO)
    assert not chk and chk.path == ()


@pytest.mark.parametrize("sg", S.ALL, ids=lambda s: s.name)
def test_exhaustive_short_words_against_dp(sg):
    for n in range(1, 7):
        for w in itertools.product(sg.carrier, repeat=n):
            w = list(w)
            f = build_forest(w, sg)
            assert verify_forest(f.root, w, sg)
            assert oracles.min_h_rank(w, sg.mul) <= f.depth <= f.bound


@pytest.mark.parametrize("sg", S.ALL, ids=lambda s: s.name)
def test_depth_plateau(sg):
    depths = {}
    for n in (50, 500, 5000):
        rnd = random.Random(n)
        worst = 0
        for _ in range(5):
            w = [rnd.choice(sg.carrier) for _ in range(n)]
            f = build_forest(w, sg)
            assert verify_forest(f.root, w, sg)
            assert f.depth <= f.stats["max_bound"]
            worst = max(worst, f.depth)
        depths[n] = worst
    assert depths[5000] <= max(depths[50], depths[500])


@given(st.lists(st.sampled_from(["e", "g", "z"]), min_size=1, max_size=60))
def test_forest_properties(w):
    for f in (build_forest(w, S.Z2_ZERO), build_forest_greedy(w, S.Z2_ZERO)):
        assert verify_forest(f.root, w, S.Z2_ZERO)
        assert f.root.image == S.Z2_ZERO.product(w)
        assert leaf_positions(f.root) == list(range(len(w)))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=40))
def test_dump_parse_round_trip(w):
    f = build_forest(w, S.Z3)
    text = dump_forest(f.root)
    g = parse_forest(text, w, S.Z3)
    assert dump_forest(g) == text
    assert verify_forest(g, w, S.Z3)


def test_parse_rejects_tampered_hash():
    w = ["z", "z", "z"]
    text = dump_forest(build_forest(w, S.Z2_ZERO).root)
    bad = text.replace(text.split()[1], "0000000000", 1)
    with pytest.raises(InputError):
        parse_forest(bad, w, S.Z2_ZERO)
    with pytest.raises(InputError):
        parse_forest("L 4\n", w, S.Z2_ZERO)
