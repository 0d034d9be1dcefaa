"""Hypothesis strategies for the library's value types."""
from hypothesis import strategies as st

from cwforge.derivations import Derivation, mask_of
from cwforge.graphs import ColoredGraph
from cwforge.terms import AddVertex, Const, LinearWord, RecolorInstr, make_join, make_recolor


@st.composite
def graphs(draw, max_vertices=7, k=None):
    k = k or draw(st.integers(1, 3))
    n = draw(st.integers(0, max_vertices))
    ids = sorted(draw(st.sets(st.integers(1, 40), min_size=n, max_size=n)))
    colors = {v: draw(st.integers(1, k)) for v in ids}
    pairs = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:]]
    edges = [p for p in pairs if draw(st.booleans())]
    return ColoredGraph(k, colors, edges)


@st.composite
def words(draw, k=None, max_len=30, min_len=0):
    k = k or draw(st.integers(1, 3))
    n = draw(st.integers(min_len, max_len))
    out, vid = [], 1
    for _ in range(n):
        if draw(st.integers(0, 4)) == 0:
            out.append(RecolorInstr(tuple(draw(st.integers(1, k)) for _ in range(k))))
        else:
            prof = frozenset(draw(st.sets(st.integers(1, k))))
            out.append(AddVertex(draw(st.integers(1, k)), prof, vid))
            vid += 1
    return LinearWord(k, tuple(out))


@st.composite
def derivations(draw, k=None, max_vertices=4, first_id=1, min_vertices=0):
    k = k or draw(st.integers(1, 3))
    n = draw(st.integers(min_vertices, max_vertices))
    ids = list(range(first_id, first_id + n))
    colors = {v: draw(st.integers(1, k)) for v in ids}
    edges = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:] if draw(st.booleans())]
    lam = {v: mask_of(draw(st.sets(st.integers(1, k)))) for v in ids}
    phi = tuple(draw(st.integers(1, k)) for _ in range(k))
    return Derivation(ColoredGraph(k, colors, edges), lam, phi)


@st.composite
def terms(draw, k=3, max_leaves=8):
    n = draw(st.integers(1, max_leaves))
    pool = [Const(draw(st.integers(1, k)), i + 1) for i in range(n)]
    while len(pool) > 1:
        if draw(st.booleans()):
            i = draw(st.integers(0, len(pool) - 1))
            pool[i] = make_recolor({c: draw(st.integers(1, k)) for c in range(1, k + 1)}, pool[i])
            continue
        r = draw(st.integers(2, len(pool)))
        kids, pool = pool[:r], pool[r:]
        pairs = draw(st.sets(st.tuples(st.integers(1, k), st.integers(1, k)), max_size=4))
        pool.append(make_join(pairs, kids))
        pool = pool[-1:] + pool[:-1]
    return pool[0]


@st.composite
def triples(draw):
    k = draw(st.integers(1, 3))
    a = draw(derivations(k=k, first_id=1))
    b = draw(derivations(k=k, first_id=10))
    c = draw(derivations(k=k, first_id=20))
    return a, b, c
