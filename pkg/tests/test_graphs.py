import pytest
from hypothesis import given, strategies as st

from cwforge.errors import InputError
from cwforge.graphs import ColoredGraph, connected_components, flip, is_isomorphic, partition_rank

import oracles
from strategies import graphs


def test_flip_empty_side_is_identity():
    g = ColoredGraph(2, {1: 1, 2: 2, 3: 1}, [(1, 2)])
    assert flip(g, [], [1, 2, 3]) == g


def test_flip_two_isolated_vertices_adds_edge():
    g = ColoredGraph(1, {1: 1, 2: 1})
    assert flip(g, [1], [2]).edge_set() == {(1, 2)}


def test_flip_overlapping_sides_toggles_each_pair_once():
    g = ColoredGraph(1, {1: 1, 2: 1, 3: 1})
    h = flip(g, [1, 2], [1, 2, 3])
    assert h.edge_set() == {(1, 2), (1, 3), (2, 3)}


def test_flip_unknown_vertex():
    with pytest.raises(InputError):
        flip(ColoredGraph(1, {1: 1}), [1], [9])


def test_graph_rejects_loops_and_strangers():
    with pytest.raises(InputError):
        ColoredGraph(1, {1: 1}, [(1, 1)])
    with pytest.raises(InputError):
        ColoredGraph(1, {1: 1}, [(1, 2)])
    with pytest.raises(InputError):
        ColoredGraph(1, {1: 2})


def test_components_small_cases():
    assert connected_components(ColoredGraph.empty(1)) == []
    g = ColoredGraph(1, {3: 1, 1: 1, 2: 1})
    assert connected_components(g) == [(1,), (2,), (3,)]
    path = ColoredGraph(1, {1: 1, 2: 1, 3: 1}, [(1, 2), (2, 3)])
    assert connected_components(path) == [(1, 2, 3)]


def test_partition_rank_examples():
    g = ColoredGraph(1, {1: 1, 2: 1, 3: 1})
    assert partition_rank(g, [1]) == 2
    k23 = ColoredGraph(1, {v: 1 for v in range(1, 6)}, [(a, b) for a in (1, 2) for b in (3, 4, 5)])
    assert partition_rank(k23, [1, 2]) == 2
    path = ColoredGraph(1, {1: 1, 2: 1, 3: 1}, [(1, 2), (2, 3)])
    assert partition_rank(path, [2]) == 2


@given(graphs(), st.data())
def test_flip_involution_and_commutation(g, data):
    vs = sorted(g.vertices)
    X = data.draw(st.sets(st.sampled_from(vs))) if vs else set()
    Y = data.draw(st.sets(st.sampled_from(vs))) if vs else set()
    P = data.draw(st.sets(st.sampled_from(vs))) if vs else set()
    assert flip(flip(g, X, Y), X, Y) == g
    assert flip(flip(g, X, Y), P, P) == flip(flip(g, P, P), X, Y)
    h = flip(g, X, Y)
    assert h.colors == g.colors


@given(graphs(max_vertices=8))
def test_components_match_transitive_closure(g):
    got = {frozenset(c) for c in connected_components(g)}
    want = set(oracles.closure_components(g.vertices, g.edges))
    assert got == want
    comps = connected_components(g)
    assert [min(c) for c in comps] == sorted(min(c) for c in comps)


@given(graphs(max_vertices=8), st.data())
def test_partition_rank_oracle_and_symmetry(g, data):
    vs = sorted(g.vertices)
    V0 = data.draw(st.sets(st.sampled_from(vs))) if vs else set()
    r = partition_rank(g, V0)
    assert r == oracles.partition_rank_plain(g.vertices, g.edges, V0)
    assert r == partition_rank(g, set(vs) - V0)
    assert r <= len(vs)
    if vs:
        assert r >= 1


@given(graphs(max_vertices=6), st.randoms(use_true_random=False))
def test_isomorphism_under_relabeling(g, rnd):
    vs = list(g.vertices)
    perm = vs[:]
    rnd.shuffle(perm)
    h = g.relabeled(dict(zip(vs, [p + 100 for p in perm])))
    assert is_isomorphic(g, h)
    assert oracles.isomorphic_plain(oracles.graph_plain(g), oracles.graph_plain(h))


def test_isomorphism_negative():
    p3 = ColoredGraph(1, {1: 1, 2: 1, 3: 1}, [(1, 2), (2, 3)])
    k3 = ColoredGraph(1, {1: 1, 2: 1, 3: 1}, [(1, 2), (2, 3), (1, 3)])
    assert not is_isomorphic(p3, k3)
