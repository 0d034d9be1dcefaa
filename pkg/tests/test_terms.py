import pytest
from hypothesis import given, strategies as st

from cwforge.errors import InputError
from cwforge.generators import gen_term, rng_for
from cwforge.terms import (EMPTY, colors_mentioned, AddVertex, Const, Empty, Join, LinearWord, RecolorInstr, enforce_colors,
                           eval_term, eval_word, leaves, linear_to_term, make_join, normalize, restrict_term,
                           width)

import fixtures
import oracles
from strategies import terms, words


def plain(g):
    return oracles.graph_plain(g)


def test_constant_and_theta1():
    g = eval_term(Const(2, 5))
    assert g.vertices == (5,) and g.color(5) == 2 and g.num_edges() == 0
    g = eval_term(fixtures.theta1())
    assert g.num_edges() == 6
    assert sorted(g.color(v) for v in g.vertices) == [1, 1, 1, 2]


def test_chain_term_and_word_agree(chain_word, chain_term):
    gw, gt = eval_word(chain_word), eval_term(chain_term)
    assert gw.edge_set() == fixtures.CHAIN_EDGES
    assert gt.edge_set() == fixtures.CHAIN_EDGES
    assert len(gw) == 12 and gw.num_edges() == 20


def test_empty_and_single_words():
    assert len(eval_word(LinearWord(2, ()))) == 0
    g = eval_word(LinearWord(1, (AddVertex(1, frozenset(), 1),)))
    assert g.vertices == (1,) and g.color(1) == 1
    assert isinstance(linear_to_term(LinearWord(1, ())), Empty)


def test_word_validation():
    with pytest.raises(InputError):
        LinearWord(2, (AddVertex(3, frozenset(), 1),))
    with pytest.raises(InputError):
        LinearWord(1, (AddVertex(1, frozenset(), 1), AddVertex(1, frozenset(), 1)))
    with pytest.raises(InputError):
        LinearWord(2, (RecolorInstr((1,)),))


def test_join_with_only_empty_children_is_empty():
    assert make_join([(1, 1)], [EMPTY, EMPTY]) is EMPTY
    assert make_join([(1, 1)], [Const(1, 1)]) == Const(1, 1)


def test_duplicate_leaf_rejected():
    with pytest.raises(InputError):
        eval_term(Join(frozenset(), (Const(1, 1), Const(1, 1))))


def test_linear_to_term_on_chain(chain_word):
    t = linear_to_term(chain_word)
    assert width(t) <= 4
    assert eval_term(t, 4).edge_set() == eval_word(chain_word).edge_set()


def test_enforce_on_theta1():
    t = enforce_colors(fixtures.theta1(), {1: 1, 2: 1, 3: 1, 4: 2})
    g = eval_term(t)
    assert width(t) <= 6
    assert [g.color(v) for v in (1, 2, 3, 4)] == [1, 1, 1, 2]
    assert g.edge_set() == eval_term(fixtures.theta1()).edge_set()


def test_enforce_partial_partition_rejected():
    with pytest.raises(InputError):
        enforce_colors(fixtures.theta1(), {1: 1})


def test_restrict_examples(chain_term):
    full = eval_term(chain_term)
    assert eval_term(restrict_term(chain_term, full.vertices)).edge_set() == full.edge_set()
    assert isinstance(restrict_term(chain_term, []), Empty)
    mid = restrict_term(chain_term, [5, 6, 7, 8])
    assert eval_term(mid).edge_set() == {(a, b) for a in range(5, 9) for b in range(a + 1, 9)}
    with pytest.raises(InputError):
        restrict_term(chain_term, [99])


@given(words(max_len=40))
def test_word_eval_matches_oracle_and_embedding(w):
    g = eval_word(w)
    assert plain(g) == oracles.eval_word_plain(w.k, oracles.word_as_plain(w))
    t = linear_to_term(w)
    if len(g):
        assert width(t) <= w.k + 1
        assert eval_term(t, w.k + 1) == eval_word(w).with_colors(g.colors, w.k + 1)


@given(terms())
def test_term_eval_matches_oracle(t):
    assert plain(eval_term(t, 3)) == oracles.eval_term_plain(t)


@given(terms(), st.randoms(use_true_random=False))
def test_join_children_commute(t, rnd):
    def shuffle(n):
        if isinstance(n, Join):
            kids = [shuffle(c) for c in n.children]
            rnd.shuffle(kids)
            return Join(n.pairs, tuple(kids))
        if hasattr(n, "child"):
            return type(n)(n.mapping, shuffle(n.child))
        return n
    assert eval_term(shuffle(t), 3) == eval_term(t, 3)


@given(terms(), st.data())
def test_restrict_is_induced_subgraph(t, data):
    keep = data.draw(st.sets(st.sampled_from(leaves(t))))
    r = restrict_term(t, keep)
    g = eval_term(t, 3)
    assert eval_term(r, 3) == g.induced(keep)
    assert width(r) <= width(t)


@given(terms(), st.integers(1, 4), st.data())
def test_enforce_changes_only_colors(t, p, data):
    parts = {v: data.draw(st.integers(1, p)) for v in leaves(t)}
    e = enforce_colors(t, parts)
    g, h = eval_term(t, 3), eval_term(e)
    assert h.edge_set() == g.edge_set()
    assert all(h.color(v) == parts[v] for v in leaves(t))
    # budget k = largest color in use; the output stays inside 1..k*p
    assert max(colors_mentioned(e)) <= max(colors_mentioned(t)) * p
    assert width(e) <= max(colors_mentioned(t)) * p


def test_enforce_restrict_on_random_terms():
    # the seeded corpus variant of the two properties above
    for i in range(100):
        rng = rng_for(11, i)
        t = gen_term(rng, 3, int(rng.integers(1, 12)))
        vs = leaves(t)
        parts = {v: int(rng.integers(1, 4)) for v in vs}
        assert eval_term(enforce_colors(t, parts)).edge_set() == eval_term(t, 3).edge_set()
        keep = [v for v in vs if rng.random() < 0.5]
        assert eval_term(restrict_term(t, keep), 3) == eval_term(t, 3).induced(keep)


def test_normalize_compacts_colors():
    t = make_join([(5, 9)], [Const(5, 1), Const(9, 2)])
    n = normalize(t)
    assert width(n) == 2 and max(c for c in (1, 2)) == 2
    assert eval_term(n).edge_set() == {(1, 2)}
