"""Slow, independent reference implementations used only by the tests.

Nothing here imports the library's algorithms; graphs come back as plain
(colors dict, edge set) pairs so a shared bug cannot hide on both sides.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations

Plain = tuple[dict, frozenset]


def edge(u, v):
    return (u, v) if u < v else (v, u)


# ---------------------------------------------------------------- words and terms

def eval_word_plain(k: int, instructions) -> Plain:
    """instructions: ('a', color, profile set, id) or ('r', images tuple)."""
    color: dict = {}
    edges = set()
    for ins in instructions:
        if ins[0] == "a":
            _, c, prof, vid = ins
            for u, cu in color.items():
                if cu in prof:
                    edges.add(edge(u, vid))
            color[vid] = c
        else:
            images = ins[1]
            color = {u: images[c - 1] for u, c in color.items()}
    return color, frozenset(edges)


def word_as_plain(w):
    """Translate a library LinearWord into oracle instructions by field access only."""
    out = []
    for ins in w.instructions:
        if hasattr(ins, "vertex"):
            out.append(("a", ins.color, set(ins.profile), ins.vertex))
        else:
            out.append(("r", tuple(ins.images)))
    return out


def eval_term_plain(t) -> Plain:
    """Recursive evaluation straight from the join/recolor semantics."""
    name = type(t).__name__
    if name == "Empty":
        return {}, frozenset()
    if name == "Const":
        return {t.vertex: t.color}, frozenset()
    if name == "Recolor":
        col, e = eval_term_plain(t.child)
        m = dict(t.mapping)
        return {v: m.get(c, c) for v, c in col.items()}, e
    parts = [eval_term_plain(ch) for ch in t.children]
    col: dict = {}
    edges = set()
    for pc, pe in parts:
        col.update(pc)
        edges |= pe
    for i, j in combinations(range(len(parts)), 2):
        for u, cu in parts[i][0].items():
            for v, cv in parts[j][0].items():
                if (min(cu, cv), max(cu, cv)) in t.pairs:
                    edges.add(edge(u, v))
    return col, frozenset(edges)


def graph_plain(g) -> Plain:
    return {v: g.color(v) for v in g.vertices}, frozenset(edge(u, v) for u, v in g.edges)


# ---------------------------------------------------------------- graph predicates

def closure_components(vertices, edges) -> list[frozenset]:
    """Connectivity by boolean transitive closure (Warshall)."""
    vs = sorted(vertices)
    ix = {v: i for i, v in enumerate(vs)}
    n = len(vs)
    R = [[i == j for j in range(n)] for i in range(n)]
    for u, v in edges:
        R[ix[u]][ix[v]] = R[ix[v]][ix[u]] = True
    for m in range(n):
        for i in range(n):
            if R[i][m]:
                for j in range(n):
                    if R[m][j]:
                        R[i][j] = True
    seen, out = set(), []
    for i in range(n):
        if i in seen:
            continue
        cls = frozenset(vs[j] for j in range(n) if R[i][j])
        seen |= {ix[v] for v in cls}
        out.append(cls)
    return out


def partition_rank_plain(vertices, edges, V0) -> int:
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    V0 = set(V0)
    V1 = set(vertices) - V0
    sigs = set()
    for v in V0:
        sigs.add((0, frozenset(adj[v] & V1)))
    for v in V1:
        sigs.add((1, frozenset(adj[v] & V0)))
    return len(sigs)


def isomorphic_plain(a: Plain, b: Plain) -> bool:
    """Backtracking isomorphism on uncolored graphs with degree pruning."""
    (ca, ea), (cb, eb) = a, b
    va, vb = sorted(ca), sorted(cb)
    if len(va) != len(vb) or len(ea) != len(eb):
        return False
    na = {v: set() for v in va}
    nb = {v: set() for v in vb}
    for u, v in ea:
        na[u].add(v)
        na[v].add(u)
    for u, v in eb:
        nb[u].add(v)
        nb[v].add(u)
    m: dict = {}
    used = set()

    def go(i):
        if i == len(va):
            return True
        u = va[i]
        for x in vb:
            if x in used or len(nb[x]) != len(na[u]):
                continue
            if all((m[w] in nb[x]) == (w in na[u]) for w in va[:i]):
                m[u] = x
                used.add(x)
                if go(i + 1):
                    return True
                used.discard(x)
                del m[u]
        return False

    return go(0)


# ---------------------------------------------------------------- derivations

def compose_plain(d1, d2) -> tuple[dict, frozenset, dict, tuple]:
    """Composition from the definition; derivations given as (colors, edges, profile sets, phi)."""
    c1, e1, l1, p1 = d1
    c2, e2, l2, p2 = d2
    assert not set(c1) & set(c2)
    col = {v: p2[c - 1] for v, c in c1.items()}
    col.update(c2)
    edges = set(e1) | set(e2)
    for u, cu in c1.items():
        for v in c2:
            if cu in l2[v]:
                edges.add(edge(u, v))
    prof = dict(l1)
    for v in c2:
        prof[v] = frozenset(x for x in range(1, len(p1) + 1) if p1[x - 1] in l2[v])
    phi = tuple(p2[p1[i] - 1] for i in range(len(p1)))
    return col, frozenset(edges), prof, phi


def derivation_plain(s):
    bits = lambda m: frozenset(i + 1 for i in range(m.bit_length()) if m >> i & 1)
    return ({v: s.G.color(v) for v in s.G.vertices}, frozenset(edge(u, v) for u, v in s.G.edges),
            {v: bits(m) for v, m in s.lam.items()}, tuple(s.phi))


def registry_plain(s, Z) -> set:
    """(c, d, W) triples by enumerating every simple path in the Z-flip."""
    col, edges, prof, _ = derivation_plain(s)
    mask = lambda X: sum(1 << (x - 1) for x in X)
    cell = {v: (col[v], mask(prof[v])) for v in col}
    adj = {v: set() for v in col}
    for u, v in combinations(sorted(col), 2):
        key = tuple(sorted((cell[u], cell[v])))
        if (edge(u, v) in edges) != (key in Z):
            adj[u].add(v)
            adj[v].add(u)
    L = sorted(set(cell.values()))
    witnessed = set()  # (c, d, frozenset of internal cells)

    def walk(path):
        u0, u1 = path[0], path[-1]
        witnessed.add((cell[u0], cell[u1], frozenset(cell[x] for x in path[1:-1])))
        for x in adj[u1]:
            if x not in path:
                walk(path + [x])

    for v in col:
        walk([v])
    out = set()
    for r in range(len(L) + 1):
        for W in combinations(L, r):
            Wf = frozenset(W)
            for c, d, inner in witnessed:
                if inner <= Wf:
                    out.add((c, d, Wf))
    return out


# ---------------------------------------------------------------- forests

def min_h_rank(word, mul) -> int:
    """Least depth of a forest over ``word`` (leaf depth 1), by exhaustive DP."""
    n = len(word)

    @lru_cache(maxsize=None)
    def image(i, j):
        acc = word[i]
        for x in word[i + 1:j]:
            acc = mul(acc, x)
        return acc

    @lru_cache(maxsize=None)
    def h(i, j):
        if j - i == 1:
            return 1
        best = min(max(h(i, m), h(m, j)) + 1 for m in range(i + 1, j))
        e = image(i, j)
        if mul(e, e) == e:
            split = seg(i, j, e, 2)
            if split is not None:
                best = min(best, split + 1)
        return best

    @lru_cache(maxsize=None)
    def seg(i, j, e, need):
        # least max-depth cutting [i, j) into >= need blocks of image e
        best = None
        for m in range(i + 1, j + 1):
            if image(i, m) != e:
                continue
            if m == j:
                if need <= 1:
                    d = h(i, m)
                    best = d if best is None else min(best, d)
                continue
            rest = seg(m, j, e, max(need - 1, 1))
            if rest is not None:
                d = max(h(i, m), rest)
                best = d if best is None else min(best, d)
        return best

    return h(0, n)


# ---------------------------------------------------------------- block order

def block_before(block_of: dict, u, v) -> bool:
    return block_of[u] <= block_of[v]
