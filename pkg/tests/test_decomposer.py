import pytest
from hypothesis import given

from cwforge.decomposer import (assemble_binary, assemble_idempotent, decompose, verify_decomposition,
                                width_bound, word_forest)
from cwforge.derivations import Derivation, atomic, product
from cwforge.errors import InputError
from cwforge.factorization import verify_forest
from cwforge.generators import GenSpec, gen_word
from cwforge.graphs import ColoredGraph
from cwforge.terms import (EMPTY, AddVertex, Const, Join, LinearWord, Recolor, RecolorInstr,
                           eval_term, eval_word, leaves, linear_to_term, postorder)

from strategies import derivations, words


def test_single_add_vertex():
    w = LinearWord(2, (AddVertex(2, frozenset(), 9),))
    r = decompose(w)
    assert isinstance(r.term, Const) and r.width == 1 and r.term.vertex == 9


def test_empty_word_rejected():
    with pytest.raises(InputError):
        decompose(LinearWord(1, ()))


def test_chain_decomposition(chain_word):
    r = decompose(chain_word, check=True)
    assert verify_decomposition(chain_word, r)
    assert eval_term(r.term, r.width).edge_set() == eval_word(chain_word).edge_set()
    assert r.width <= r.width_bound


@pytest.mark.parametrize("mode", ["cells", "colors"])
@given(w=words(max_len=40, min_len=1))
def test_decompose_is_sound(mode, w):
    if not w.vertices():
        w = w + LinearWord(w.k, (AddVertex(1, frozenset(), 999),))
    r = decompose(w, mode=mode)
    assert verify_decomposition(w, r)
    assert sorted(leaves(r.term)) == sorted(w.vertices())
    if mode == "cells":
        assert r.width <= width_bound(w.k, r.forest_depth)


def test_width_plateau_k2():
    widths = {n: max(decompose(gen_word(GenSpec(2, n, seed=s))).width for s in range(3)) for n in (10, 100, 1000)}
    assert widths[1000] <= max(widths[10], widths[100])
    assert widths[1000] <= 2 * 2 * 4


def test_per_level_widths_are_reported():
    r = decompose(gen_word(GenSpec(2, 200, seed=4)))
    assert len(r.per_level_widths) == r.forest_depth
    assert max(r.per_level_widths) >= 1


def test_word_forest_verifies():
    w = gen_word(GenSpec(2, 300, seed=1))
    f = word_forest(w)
    from cwforge.abstraction import reduced
    from cwforge.decomposer import REDUCED_SEMIGROUP
    from cwforge.derivations import _atomic_of
    imgs = [reduced(_atomic_of(2, x)) for x in w.instructions]
    assert verify_forest(f.root, imgs, REDUCED_SEMIGROUP)


def test_verify_rejects_dropped_join_pair(chain_word):
    t = linear_to_term(chain_word)
    # remove one pair from the first join that has any
    target = next(n for n in postorder(t) if isinstance(n, Join) and n.pairs)

    def rebuild(n):
        if n is target:
            return Join(frozenset(sorted(n.pairs)[1:]), n.children)
        if isinstance(n, Join):
            return Join(n.pairs, tuple(rebuild(c) for c in n.children))
        if isinstance(n, Recolor):
            return Recolor(n.mapping, rebuild(n.child))
        return n

    assert verify_decomposition(chain_word, t)
    assert not verify_decomposition(chain_word, rebuild(t))


def test_verify_rejects_foreign_word(chain_word):
    r = decompose(gen_word(GenSpec(2, 20, seed=3)))
    assert not verify_decomposition(chain_word, r)


def test_binary_two_vertices():
    s = atomic(1, color=1, vertex=1)
    tau = atomic(1, color=1, profile={1}, vertex=2)
    t = assemble_binary(s, tau, Const(1, 1), Const(1, 2))
    assert eval_term(t).edge_set() == {(1, 2)}


def test_binary_with_empty_right_side():
    s = Derivation(ColoredGraph(2, {1: 1, 2: 2}, [(1, 2)]), {1: 0, 2: 0}, (1, 2))
    t_s = Join(frozenset({(1, 2)}), (Const(1, 1), Const(2, 2)))
    t = assemble_binary(s, atomic(2, phi=(2, 2)), t_s, EMPTY)
    g = eval_term(t)
    assert g.edge_set() == {(1, 2)} and {g.color(1), g.color(2)} == {2}


def test_binary_rejects_wrong_term():
    s = atomic(1, color=1, vertex=1)
    with pytest.raises(InputError):
        assemble_binary(s, s, Const(1, 5), Const(1, 1))


@given(derivations(k=2, max_vertices=4), derivations(k=2, max_vertices=4, first_id=10))
def test_binary_random_pairs(s, tau):
    ts = linear_to_term(_word_for(s)) if len(s.G) else EMPTY
    tt = linear_to_term(_word_for(tau)) if len(tau.G) else EMPTY
    t = assemble_binary(s, tau, ts, tt)
    assert eval_term(t, 2) == product([s, tau]).G


def _word_for(s):
    """A word whose graph is s.G (colors included)."""
    ids = sorted(s.G.vertices)
    k = max(s.k, len(ids))
    # give every vertex its own color, connect by profile, then recolor down
    ins = []
    for i, v in enumerate(ids):
        prof = frozenset(j + 1 for j, u in enumerate(ids[:i]) if s.G.has_edge(u, v))
        ins.append(AddVertex(i + 1, prof, v))
    images = tuple(s.G.color(ids[i]) if i < len(ids) else 1 for i in range(k))
    ins.append(RecolorInstr(images))
    return LinearWord(k, tuple(ins))


def test_idempotent_single_factor():
    s = Derivation(ColoredGraph(1, {1: 1, 2: 1}, [(1, 2)]), {1: 1, 2: 1}, (1,))
    t = linear_to_term(_word_for(s))
    assert eval_term(assemble_idempotent([s], [t])).edge_set() == {(1, 2)}


def test_idempotent_three_self_positive_blocks():
    blocks = [atomic(1, color=1, profile={1}, vertex=v) for v in (1, 2, 3)]
    t = assemble_idempotent(blocks, [Const(1, v) for v in (1, 2, 3)])
    assert eval_term(t).edge_set() == {(1, 2), (1, 3), (2, 3)}


def test_idempotent_rejects_mixed_family():
    a = atomic(1, color=1, profile={1}, vertex=1)
    b = atomic(1, color=1, vertex=2)
    with pytest.raises(InputError):
        assemble_idempotent([a, b], [Const(1, 1), Const(1, 2)])


def test_idempotent_powers_width_is_flat():
    from cwforge.orderlab import power_base, power_factors
    tau = power_base(2, 5)
    base = linear_to_term(_word_for(tau))
    widths = []
    for n in (2, 8, 32):
        fs = power_factors(tau, n)
        shift = max(tau.G.vertices)
        terms = [_shift_term(base, i * shift) for i in range(n)]
        t = assemble_idempotent(fs, terms, output="cells")
        assert eval_term(t, 10**6).uncolored_equal(product(fs).G)
        widths.append(len({c for n_ in postorder(t) for c in _colors_at(n_)}))
    assert widths[-1] == widths[-2]


def _shift_term(t, d):
    if isinstance(t, Const):
        return Const(t.color, t.vertex + d)
    if isinstance(t, Recolor):
        return Recolor(t.mapping, _shift_term(t.child, d))
    if isinstance(t, Join):
        return Join(t.pairs, tuple(_shift_term(c, d) for c in t.children))
    return t


def _colors_at(n):
    if isinstance(n, Const):
        return {n.color}
    if isinstance(n, Recolor):
        return {x for p in n.mapping for x in p}
    if isinstance(n, Join):
        return {x for p in n.pairs for x in p}
    return set()
