from hypothesis import given, strategies as st

from cwforge.abstraction import (MIXED, POSITIVE, Reduced, abstract, all_zs, is_idempotent, pair_type,
                                 phi_is_idempotent, positive_Z, reduced, reduced_compose)
from cwforge.derivations import Derivation, all_cells, atomic, compose, from_word
from cwforge.graphs import ColoredGraph

import oracles
from strategies import derivations, triples


def test_empty_derivation():
    a = abstract(atomic(2))
    assert a.L == frozenset() and a.rho == frozenset()
    assert reduced(atomic(2, phi=(2, 2))) == Reduced(0, (2, 2))


def test_single_vertex_has_trivial_paths():
    s = atomic(1, color=1, profile={1}, vertex=1)
    a = abstract(s)
    c = (1, 1)
    assert {Z for Z in a.zfamily} == set(all_zs(1))
    for Z in a.zfamily:
        assert (Z, c, c, frozenset()) in a.rho


def test_adjacent_pair_without_flip():
    s = Derivation(ColoredGraph(2, {1: 1, 2: 2}, [(1, 2)]), {1: 0, 2: 0}, (1, 2))
    empty = frozenset()
    a = abstract(s, [empty])
    assert (empty, (1, 0), (2, 0), frozenset()) in a.rho


def test_reduced_of_chain(chain_word):
    s = from_word(chain_word)
    assert reduced(s).cells() == s.nonempty_cells()
    assert reduced(abstract(s)) == reduced(abstract(s, [frozenset()])) == reduced(s)


def test_reduced_compose_with_neutral_right():
    e = Reduced.of([(1, 1), (2, 0)], (2, 2))
    assert reduced_compose(e, Reduced(0, (1, 2))) == e


def test_idempotency_examples():
    assert is_idempotent(Reduced(0, (1, 2)))
    e = Reduced.of([(1, 0)], (1,))
    assert reduced_compose(e, e) == e and is_idempotent(e)
    e = Reduced.of([(1, 0)], (1, 1))
    ee = reduced_compose(e, e)
    assert ee.cells() == {(1, 0)} and is_idempotent(e) == (ee == e)
    assert phi_is_idempotent((1, 2)) and phi_is_idempotent((1, 1, 1))
    assert not phi_is_idempotent((2, 1))


def test_pair_types():
    ident = (1, 2)
    assert pair_type((1, 0), (1, 0), ident) == "negative"
    assert pair_type((1, 1), (1, 1), ident) == POSITIVE
    assert pair_type((1, 0b10), (2, 0), ident) == MIXED


def test_positive_z_examples():
    assert positive_Z([], (1,)) == frozenset()
    assert positive_Z([(1, 1)], (1,)) == frozenset({((1, 1), (1, 1))})


@given(derivations(max_vertices=5), st.data())
def test_registry_matches_path_enumeration(s, data):
    cells = sorted(s.nonempty_cells())
    pairs = [(c, d) for i, c in enumerate(cells) for d in cells[i:]]
    Z = frozenset(data.draw(st.sets(st.sampled_from(pairs)))) if pairs else frozenset()
    a = abstract(s, [Z])
    got = {(c, d, W) for Z2, c, d, W in a.rho if Z2 == Z}
    assert got == oracles.registry_plain(s, Z)
    assert a.L == s.nonempty_cells()


@given(triples())
def test_reduced_is_a_homomorphism(abc):
    a, b, c = abc
    ra, rb, rc = reduced(a), reduced(b), reduced(c)
    assert reduced(compose(a, b)) == reduced_compose(ra, rb)
    assert reduced_compose(reduced_compose(ra, rb), rc) == reduced_compose(ra, reduced_compose(rb, rc))


@given(derivations(max_vertices=4))
def test_some_power_is_idempotent(s):
    e = reduced(s)
    seen = [e]
    while True:
        nxt = reduced_compose(seen[-1], e)
        if nxt in seen:
            break
        seen.append(nxt)
    idem = [m for m, x in enumerate(seen, start=1) if is_idempotent(x)]
    assert idem and idem[0] <= len(seen)


@given(st.integers(1, 3), st.data())
def test_phi_idempotence_agrees_with_squaring(k, data):
    phi = tuple(data.draw(st.integers(1, k)) for _ in range(k))
    assert phi_is_idempotent(phi) == (tuple(phi[phi[i] - 1] for i in range(k)) == phi)


@given(st.integers(1, 3), st.data())
def test_pair_type_stability_and_positive_z(k, data):
    phi = tuple(data.draw(st.integers(1, k)) for _ in range(k))
    if not phi_is_idempotent(phi):
        phi = tuple(1 for _ in range(k))
    cells = all_cells(k)
    L = data.draw(st.sets(st.sampled_from(cells)))
    Z = positive_Z(L, phi)
    for c, d in Z:
        assert pair_type(c, d, phi) == POSITIVE
    pre = lambda X: sum(1 << (x - 1) for x in range(1, k + 1) if X >> (phi[x - 1] - 1) & 1)
    for (i, X) in cells:
        for d in cells:
            t = pair_type((i, X), d, phi)
            assert pair_type((phi[i - 1], X), d, phi) == t
            assert pair_type((i, pre(X)), d, phi) == t
    for c in cells:
        assert pair_type(c, c, phi) != MIXED
