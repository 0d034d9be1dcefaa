"""Executable block-order lab over products of equal-abstraction factors.

Given factors sigma_1..sigma_n with a common idempotent abstraction, the block
order (u before-or-equal v iff u's factor index is at most v's) is recovered
from the graph alone: adjacency, the cell partition U_c and block moduli
(index mod 7).  Every procedure here decides the order from those inputs and
never reads the block labels; ``claims_suite`` then compares each decision
with the labels.

All relations are dense boolean matrices over a fixed vertex indexing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product as iproduct
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .abstraction import MIXED, abstract, is_idempotent, pair_type, phi_is_idempotent, positive_Z, reduced
from .derivations import (BlockProduct, Cell, Derivation, all_cells, block_product, compose,
                          preimage, zflip)
from .errors import InputError, InvariantError
from .generators import gen_derivation, rng_for
from .graphs import ColoredGraph

__all__ = [
    "pair_type", "positive_Z", "OrderLabContext", "Relation", "build_context", "is_pivot",
    "interpret_mixed_order", "interpret_component_order", "clusters", "cluster_order",
    "interpret_block_order_in_component", "ClaimResult", "ClaimsReport", "claims_suite",
    "CLAIMS", "mutated", "idempotent_power", "power_factors", "power_base", "power_context",
    "k1_universe", "ground_truth",
]

MODULUS = 7


def _mdist(a: np.ndarray | int, b: np.ndarray | int):
    d = np.abs(np.asarray(a) - np.asarray(b)) % MODULUS
    return np.minimum(d, MODULUS - d)


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean matrix product."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=bool)
    return (a.astype(np.int32) @ b.astype(np.int32)) > 0


def _closure(R: np.ndarray) -> np.ndarray:
    while True:
        nxt = R | _mm(R, R)
        if np.array_equal(nxt, R):
            return R
        R = nxt


def _labels(adj: np.ndarray, sel: np.ndarray) -> np.ndarray:
    """Component labels of the subgraph of ``adj`` induced by indices ``sel``."""
    if len(sel) == 0:
        return np.zeros(0, dtype=np.int64)
    _, lab = _cc(csr_matrix(adj[np.ix_(sel, sel)]), directed=False)
    return lab


# ------------------------------------------------------------------ context

@dataclass(frozen=True)
class Relation:
    """Binary relation on ``ids`` given as a boolean matrix."""
    ids: tuple[int, ...]
    ix: np.ndarray = field(repr=False)  # positions in the context's vertex order
    matrix: np.ndarray = field(repr=False)

    def holds(self, u: int, v: int) -> bool:
        pos = {x: i for i, x in enumerate(self.ids)}
        return bool(self.matrix[pos[u], pos[v]])

    def pairs(self) -> set[tuple[int, int]]:
        a, b = np.nonzero(self.matrix)
        return {(self.ids[i], self.ids[j]) for i, j in zip(a.tolist(), b.tolist())}

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True, eq=False)
class OrderLabContext:
    product: BlockProduct
    phi: tuple[int, ...]
    L: tuple[Cell, ...]
    Z: frozenset
    G: ColoredGraph
    H: ColoredGraph
    M: dict  # social cell -> frozenset of mixed partners
    social_components: tuple[frozenset, ...]
    h_components: tuple[tuple[int, ...], ...]
    clusters: tuple[frozenset, ...]  # sets of social-component indices
    # dense views; everything below is indexed by position in ``verts``
    verts: tuple[int, ...] = field(repr=False)
    block: np.ndarray = field(repr=False)
    mod: np.ndarray = field(repr=False)
    cell_of: tuple[Cell, ...] = field(repr=False)
    AG: np.ndarray = field(repr=False)
    AH: np.ndarray = field(repr=False)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return len(self.phi)

    @property
    def n(self) -> int:
        return self.product.n

    @property
    def social(self) -> frozenset:
        return frozenset(self.M)

    def index(self, v: int) -> int:
        pos = self.cache.get("pos")
        if pos is None:
            pos = self.cache["pos"] = {x: i for i, x in enumerate(self.verts)}
        try:
            return pos[v]
        except KeyError:
            raise InputError(f"vertex {v} is not in the product") from None

    def U(self, c: Cell) -> np.ndarray:
        key = ("U", c)
        if key not in self.cache:
            self.cache[key] = np.array([i for i, d in enumerate(self.cell_of) if d == c], dtype=np.int64)
        return self.cache[key]

    def is_mixed(self, c: Cell, d: Cell) -> bool:
        return d in self.M.get(c, ())

    def component_of_cell(self, c: Cell) -> int:
        for i, C in enumerate(self.social_components):
            if c in C:
                return i
        raise InputError(f"cell {c} is not social")

    def is_social_ix(self) -> np.ndarray:
        key = "social_ix"
        if key not in self.cache:
            soc = self.social
            self.cache[key] = np.array([c in soc for c in self.cell_of], dtype=bool)
        return self.cache[key]

    def mixed_ix(self) -> np.ndarray:
        """Vertex-by-vertex: do the two cells form a mixed pair."""
        key = "mixed_ix"
        if key not in self.cache:
            cells = self.cell_of
            uniq = sorted(set(cells))
            pos = {c: i for i, c in enumerate(uniq)}
            cm = np.array([[self.is_mixed(a, b) for b in uniq] for a in uniq], dtype=bool).reshape(len(uniq), len(uniq))
            ci = np.array([pos[c] for c in cells], dtype=np.int64)
            self.cache[key] = cm[np.ix_(ci, ci)] if len(ci) else np.zeros((0, 0), dtype=bool)
        return self.cache[key]


def _check_factors(factors: Sequence[Derivation]) -> None:
    if not factors:
        raise InputError("need at least one factor")
    r0 = reduced(factors[0])
    for s, f in enumerate(factors[1:], start=2):
        if reduced(f) != r0:
            raise InputError(f"factor {s} has a different reduced abstraction than factor 1")
    if not phi_is_idempotent(r0.phi):
        raise InputError(f"common recoloring {list(r0.phi)} is not idempotent")
    if not is_idempotent(r0):
        raise InputError("common reduced abstraction is not idempotent")


def _per_cell_flip(AG: np.ndarray, cell_of: Sequence[Cell], Z: Iterable) -> np.ndarray:
    zs = {frozenset(p) for p in Z}
    flip = np.array([[frozenset((a, b)) in zs for b in cell_of] for a in cell_of], dtype=bool)
    flip = flip.reshape(len(cell_of), len(cell_of))
    np.fill_diagonal(flip, False)
    return AG ^ flip


def _adj_matrix(g: ColoredGraph, verts: Sequence[int]) -> np.ndarray:
    pos = {v: i for i, v in enumerate(verts)}
    A = np.zeros((len(verts), len(verts)), dtype=bool)
    for u, v in g.edges:
        A[pos[u], pos[v]] = A[pos[v], pos[u]] = True
    return A


def _graph_of(A: np.ndarray, verts: Sequence[int], like: ColoredGraph) -> ColoredGraph:
    a, b = np.nonzero(np.triu(A, 1))
    return ColoredGraph(like.k, {v: like.color(v) for v in verts},
                        [(verts[i], verts[j]) for i, j in zip(a.tolist(), b.tolist())])


def _derive(bp: BlockProduct, AG: np.ndarray, AH: np.ndarray, block: np.ndarray) -> OrderLabContext:
    f0 = bp.factors[0]
    phi = f0.phi
    L = tuple(sorted(f0.nonempty_cells()))
    Z = positive_Z(L, phi)
    verts = tuple(sorted(bp.composed.G.vertex_set()))
    cell_of = tuple(bp.factor_cell(v) for v in verts)
    M: dict = {}
    for c, d in combinations(L, 2):
        if pair_type(c, d, phi) == MIXED:
            M.setdefault(c, set()).add(d)
            M.setdefault(d, set()).add(c)
    M = {c: frozenset(ds) for c, ds in M.items()}
    # components of the social graph, in order of smallest cell
    seen: set = set()
    comps = []
    for c in sorted(M):
        if c in seen:
            continue
        stack, comp = [c], set()
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(M[x] - comp)
        seen |= comp
        comps.append(frozenset(comp))
    nH, labH = _cc(csr_matrix(AH), directed=False) if len(verts) else (0, np.zeros(0, dtype=np.int64))
    groups: dict[int, list[int]] = {}
    for i, l in enumerate(labH.tolist()):
        groups.setdefault(l, []).append(verts[i])
    hcomps = tuple(sorted(tuple(g) for g in groups.values()))
    ctx = OrderLabContext(
        product=bp, phi=phi, L=L, Z=Z, G=_graph_of(AG, verts, bp.composed.G), H=_graph_of(AH, verts, bp.composed.G),
        M=M, social_components=tuple(comps), h_components=hcomps, clusters=(), verts=verts,
        block=block, mod=block % MODULUS, cell_of=cell_of, AG=AG, AH=AH)
    object.__setattr__(ctx, "clusters", _clusters(ctx))
    return ctx


def build_context(factors: Sequence[Derivation]) -> OrderLabContext:
    """Context for a product whose factors share an idempotent abstraction.

    The caller vouches for equality of full abstractions (use the power
    generator).  The flipped graph is built cell-by-cell from U_c and checked
    edge-for-edge against the Z-flip of the composed derivation.
    """
    _check_factors(factors)
    bp = block_product(factors)
    verts = tuple(sorted(bp.composed.G.vertex_set()))
    AG = _adj_matrix(bp.composed.G, verts)
    cell_of = [bp.factor_cell(v) for v in verts]
    Z = positive_Z(bp.factors[0].nonempty_cells(), bp.factors[0].phi)
    AH = _per_cell_flip(AG, cell_of, Z)
    AZ = _adj_matrix(zflip(bp.composed, Z), verts)
    if not np.array_equal(AH, AZ):
        i, j = map(int, np.argwhere(AH != AZ)[0])
        raise InvariantError(f"per-cell flip and Z-flip of the product disagree on ({verts[i]}, {verts[j]})")
    block = np.array([bp.block_of[v] for v in verts], dtype=np.int64)
    return _derive(bp, AG, AH, block)


def mutated(ctx: OrderLabContext, u: int, v: int, where: str = "G") -> OrderLabContext:
    """Copy of ``ctx`` with the pair (u, v) toggled in G (H rebuilt from it) or in H only."""
    i, j = ctx.index(u), ctx.index(v)
    if i == j:
        raise InputError("cannot toggle a loop")
    AG, AH = ctx.AG.copy(), ctx.AH.copy()
    if where == "G":
        AG[i, j] = AG[j, i] = not AG[i, j]
        AH = _per_cell_flip(AG, ctx.cell_of, ctx.Z)
    elif where == "H":
        AH[i, j] = AH[j, i] = not AH[i, j]
    else:
        raise InputError(f"unknown mutation target {where!r}")
    return _derive(ctx.product, AG, AH, ctx.block)


def ground_truth(ctx: OrderLabContext, ix: np.ndarray, jx: np.ndarray | None = None) -> np.ndarray:
    jx = ix if jx is None else jx
    return ctx.block[ix][:, None] <= ctx.block[jx][None, :]


# ------------------------------------------------------------------ mixed pairs

def _c_side(a: Cell, b: Cell, phi) -> bool:
    """True when a plays the role whose far neighbours in U_b are exactly the later ones."""
    (i, X), (j, Y) = a, b
    return not (X >> (phi[j - 1] - 1) & 1) and bool(Y >> (phi[i - 1] - 1) & 1)


def _raw_before(ctx: OrderLabContext, a: Cell, b: Cell) -> np.ndarray:
    """Adjacency read as 'earlier block' for U_a x U_b (valid for distant moduli)."""
    Ua, Ub = ctx.U(a), ctx.U(b)
    A = ctx.AG[np.ix_(Ua, Ub)]
    return A if _c_side(a, b, ctx.phi) else ~A


def _far(ctx: OrderLabContext, ix: np.ndarray, jx: np.ndarray) -> np.ndarray:
    return _mdist(ctx.mod[ix][:, None], ctx.mod[jx][None, :]) > 1


def _before(ctx: OrderLabContext, a: Cell, b: Cell) -> np.ndarray:
    return _far(ctx, ctx.U(a), ctx.U(b)) & _raw_before(ctx, a, b)


def _require_mixed(ctx: OrderLabContext, a: Cell, b: Cell) -> None:
    if a not in ctx.L or b not in ctx.L:
        raise InputError(f"cells {a}, {b} must both be essential")
    if not ctx.is_mixed(a, b):
        raise InputError(f"cells {a} and {b} do not form a mixed pair")


def is_pivot(w: int, u: int, v: int, ctx: OrderLabContext) -> bool:
    """w in U_d certifies that u (in U_c) lies in a strictly earlier block than v (in U_c)."""
    iu, iv, iw = ctx.index(u), ctx.index(v), ctx.index(w)
    if w in (u, v):  # modulus distance zero
        return False
    c, c2, d = ctx.cell_of[iu], ctx.cell_of[iv], ctx.cell_of[iw]
    if c != c2:
        raise InputError(f"{u} and {v} lie in different cells")
    _require_mixed(ctx, c, d)
    m = ctx.mod
    if _mdist(m[iu], m[iw]) <= 1 or _mdist(m[iv], m[iw]) <= 1:
        return False
    uw, vw = bool(ctx.AG[iu, iw]), bool(ctx.AG[iv, iw])
    if _c_side(c, d, ctx.phi):
        return uw and not vw
    return vw and not uw


def _pivots(ctx: OrderLabContext, a: Cell, b: Cell) -> np.ndarray:
    """[u, v] over U_a x U_a: some w in U_b is a pivot for (u, v)."""
    return _mm(_before(ctx, a, b), _before(ctx, b, a))


def _order_single(ctx: OrderLabContext, a: Cell, b: Cell) -> np.ndarray:
    key = ("single", a, b)
    if key not in ctx.cache:
        P = _pivots(ctx, a, b)
        Ua = ctx.U(a)
        diff = (ctx.mod[Ua][None, :] - ctx.mod[Ua][:, None]) % MODULUS
        ctx.cache[key] = P | (~P.T & (diff <= 3))
    return ctx.cache[key]


def _order_cross(ctx: OrderLabContext, a: Cell, b: Cell) -> np.ndarray:
    """[u, v] over U_a x U_b, using the order on U_b computed via a."""
    key = ("cross", a, b)
    if key not in ctx.cache:
        Ua, Ub = ctx.U(a), ctx.U(b)
        Rb = _order_single(ctx, b, a)
        far = _far(ctx, Ua, Ub)
        raw = _raw_before(ctx, a, b)
        star = _mm(far & raw, Rb)                   # u < w <= v
        rev = _mm(_before(ctx, b, a).T, Rb.T)      # v <= w < u
        diff = (ctx.mod[Ub][None, :] - ctx.mod[Ua][:, None]) % MODULUS
        near = star | (~rev & (diff <= 1))
        ctx.cache[key] = np.where(far, raw, near)
    return ctx.cache[key]


def interpret_mixed_order(c: Cell, d: Cell, ctx: OrderLabContext) -> Relation:
    """Block order on U_c and U_d decided by distant adjacency, pivots and moduli."""
    _require_mixed(ctx, c, d)
    Uc, Ud = ctx.U(c), ctx.U(d)
    nc = len(Uc)
    R = np.zeros((nc + len(Ud),) * 2, dtype=bool)
    R[:nc, :nc] = _order_single(ctx, c, d)
    R[nc:, nc:] = _order_single(ctx, d, c)
    R[:nc, nc:] = _order_cross(ctx, c, d)
    R[nc:, :nc] = _order_cross(ctx, d, c)
    ix = np.concatenate([Uc, Ud])
    return Relation(tuple(ctx.verts[i] for i in ix), ix, R)


def _component_ix(ctx: OrderLabContext, C: Iterable[Cell]) -> np.ndarray:
    return np.concatenate([ctx.U(c) for c in sorted(C)]) if C else np.zeros(0, dtype=np.int64)


def interpret_component_order(C: Iterable[Cell], ctx: OrderLabContext) -> Relation:
    """Order on U_C: chains of mixed-pair orders along edges of the social graph."""
    C = frozenset(C)
    if not C or any(c not in ctx.M for c in C):
        raise InputError("argument must be a set of social cells")
    key = ("comp", C)
    if key not in ctx.cache:
        ix = _component_ix(ctx, C)
        pos = {int(i): p for p, i in enumerate(ix)}
        R = np.zeros((len(ix), len(ix)), dtype=bool)
        for a in C:
            for b in ctx.M[a]:
                if b not in C:
                    raise InputError(f"cell set is not closed under mixed partners ({a} ~ {b})")
                rel = interpret_mixed_order(a, b, ctx)
                p = np.array([pos[int(i)] for i in rel.ix])
                R[np.ix_(p, p)] |= rel.matrix
        ctx.cache[key] = Relation(tuple(ctx.verts[i] for i in ix), ix, _closure(R))
    return ctx.cache[key]


# ------------------------------------------------------------------ solitary paths and clusters

def _solitary_links(ctx: OrderLabContext, pool: np.ndarray) -> np.ndarray:
    """[x, y] over social vertices of ``pool``: a solitary path inside ``pool`` joins them."""
    soc = ctx.is_social_ix()
    S = pool[~soc[pool]]
    T = pool[soc[pool]]
    lab = _labels(ctx.AH, S)
    K = np.zeros((len(S), int(lab.max()) + 1 if len(lab) else 0), dtype=bool)
    K[np.arange(len(S)), lab] = True
    touch = _mm(ctx.AH[np.ix_(T, S)], K)
    link = _mm(touch, touch.T) | ctx.AH[np.ix_(T, T)]
    return link & ~ctx.mixed_ix()[np.ix_(T, T)], T


def _social_comp_ix(ctx: OrderLabContext) -> np.ndarray:
    """Per vertex, index of its social component or -1."""
    key = "scomp_ix"
    if key not in ctx.cache:
        of = {c: i for i, C in enumerate(ctx.social_components) for c in C}
        ctx.cache[key] = np.array([of.get(c, -1) for c in ctx.cell_of], dtype=np.int64)
    return ctx.cache[key]


def _closeness(ctx: OrderLabContext, pool: np.ndarray) -> set[tuple[int, int]]:
    link, T = _solitary_links(ctx, pool)
    sc = _social_comp_ix(ctx)
    a, b = np.nonzero(link)
    return {(int(sc[T[i]]), int(sc[T[j]])) for i, j in zip(a.tolist(), b.tolist()) if sc[T[i]] != sc[T[j]]}


def _clusters(ctx: OrderLabContext) -> tuple[frozenset, ...]:
    m = len(ctx.social_components)
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in _closeness(ctx, np.arange(len(ctx.verts))):
        parent[find(a)] = find(b)
    groups: dict[int, set[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), set()).add(i)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=min))


def clusters(ctx: OrderLabContext) -> tuple[frozenset, ...]:
    """Components of the closeness graph on social components (as index sets)."""
    return _clusters(ctx)


def _cluster_of_component(ctx: OrderLabContext, i: int) -> int:
    for a, A in enumerate(ctx.clusters):
        if i in A:
            return a
    raise InvariantError(f"social component {i} belongs to no cluster")


def cluster_order(a: int, ctx: OrderLabContext) -> Relation:
    """Order on a cluster: component orders glued by same-modulus solitary links."""
    key = ("cluster", a)
    if key not in ctx.cache:
        comps = sorted(ctx.clusters[a])
        ix = np.concatenate([interpret_component_order(ctx.social_components[i], ctx).ix for i in comps])
        pos = {int(i): p for p, i in enumerate(ix)}
        R = np.zeros((len(ix), len(ix)), dtype=bool)
        for i in comps:
            rel = interpret_component_order(ctx.social_components[i], ctx)
            p = np.array([pos[int(x)] for x in rel.ix])
            R[np.ix_(p, p)] |= rel.matrix
        for m in range(MODULUS):
            pool = ix[ctx.mod[ix] == m]
            if len(pool) < 2:
                continue
            pool = np.flatnonzero(ctx.mod == m)
            link, T = _solitary_links(ctx, pool)
            keep = np.array([int(t) in pos for t in T], dtype=bool)
            T, link = T[keep], link[np.ix_(keep, keep)]
            p = np.array([pos[int(t)] for t in T], dtype=np.int64)
            R[np.ix_(p, p)] |= link | link.T
        ctx.cache[key] = Relation(tuple(ctx.verts[i] for i in ix), ix, _closure(R))
    return ctx.cache[key]


# ------------------------------------------------------------------ per H-component order

def _near(ctx: OrderLabContext, m: int) -> np.ndarray:
    return _mdist(ctx.mod, m) <= 1


def _social_anchor(ctx: OrderLabContext, F: np.ndarray, A: Relation) -> dict[int, int]:
    """For each vertex of F, a position in A lying in the same block (found without labels)."""
    soc = ctx.is_social_ix()
    pos = {int(i): p for p, i in enumerate(A.ix)}
    S = A.matrix & ~A.matrix.T  # strict
    anchors: dict[int, int] = {}
    reach: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for u in F.tolist():
        if soc[u]:
            if u not in pos:
                raise InvariantError(f"social vertex {ctx.verts[u]} lies outside the component's cluster")
            anchors[u] = pos[u]
            continue
        m = int(ctx.mod[u])
        if m not in reach:
            pool = np.flatnonzero(_near(ctx, m))
            sol = pool[~soc[pool]]
            reach[m] = (sol, _labels(ctx.AH, sol))
        sol, lab = reach[m]
        mine = sol[lab == lab[np.searchsorted(sol, u)]]
        cand = np.flatnonzero(ctx.AH[mine].any(axis=0) & soc & _near(ctx, m))
        cand = [x for x in cand.tolist() if x in pos]
        if not cand:
            raise InvariantError(f"no local solitary path from {ctx.verts[u]} to its cluster")
        x = cand[0]
        px = pos[x]
        step = (int(ctx.mod[x]) - m) % MODULUS
        if step == 0:
            anchors[u] = px
        elif step == 1:  # x sits one block later: take an immediate predecessor
            col = S[:, px]
            between = _mm(S, col[:, None])[:, 0]
            cand2 = np.flatnonzero(col & ~between)
            if not len(cand2):
                raise InvariantError(f"no block before {ctx.verts[x]} in the cluster")
            anchors[u] = int(cand2[0])
        else:  # one block earlier: immediate successor
            row = S[px]
            between = _mm(row[None, :], S)[0]
            cand2 = np.flatnonzero(row & ~between)
            if not len(cand2):
                raise InvariantError(f"no block after {ctx.verts[x]} in the cluster")
            anchors[u] = int(cand2[0])
    return anchors


def _solitary_component_order(ctx: OrderLabContext, F: np.ndarray) -> np.ndarray:
    nF = len(F)
    local = {int(x): p for p, x in enumerate(F.tolist())}
    # block equivalence: same modulus and joined inside the three neighbouring moduli
    eq = np.zeros((nF, nF), dtype=bool)
    for m in range(MODULUS):
        pool = F[_near(ctx, m)[F]]
        lab = _labels(ctx.AH, pool)
        here = ctx.mod[pool] == m
        p = np.array([local[int(x)] for x in pool[here]], dtype=np.int64)
        l = lab[here]
        eq[np.ix_(p, p)] = l[:, None] == l[None, :]
    sub = ctx.AH[np.ix_(F, F)]
    nbrs = [np.flatnonzero(sub[i]).tolist() for i in range(nF)]
    R = np.zeros((nF, nF), dtype=bool)
    for s in range(nF):
        mu = int(ctx.mod[F[s]])
        # BFS tree from s; for each node, the successor of the last vertex equivalent to s on the tree path
        succ = [-1] * nF
        seen = [False] * nF
        seen[s] = True
        order = [s]
        R[s, s] = True
        for x in order:
            for y in nbrs[x]:
                if not seen[y]:
                    seen[y] = True
                    succ[y] = -1 if eq[s, y] else (y if (x == s or eq[s, x]) else succ[x])
                    order.append(y)
                    R[s, y] = eq[s, y] or int(ctx.mod[F[succ[y]]]) == (mu + 1) % MODULUS
    return R


def interpret_block_order_in_component(F: Iterable[int], ctx: OrderLabContext) -> Relation:
    """Block order restricted to one connected component of H."""
    Fi = np.array(sorted(ctx.index(v) for v in F), dtype=np.int64)
    if len(Fi) == 0:
        raise InputError("empty component")
    soc = ctx.is_social_ix()[Fi]
    if not soc.any():
        R = _solitary_component_order(ctx, Fi)
    else:
        sc = _social_comp_ix(ctx)
        touched = {_cluster_of_component(ctx, int(sc[i])) for i in Fi[soc]}
        if len(touched) != 1:
            raise InvariantError(f"component meets {len(touched)} clusters")
        A = cluster_order(touched.pop(), ctx)
        anc = _social_anchor(ctx, Fi, A)
        a = np.array([anc[int(i)] for i in Fi], dtype=np.int64)
        R = A.matrix[np.ix_(a, a)]
    return Relation(tuple(ctx.verts[i] for i in Fi), Fi, R)


# ------------------------------------------------------------------ claims

@dataclass
class ClaimResult:
    name: str
    ok: bool
    checked: int = 0
    counterexample: str = ""


@dataclass
class ClaimsReport:
    results: list[ClaimResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[ClaimResult]:
        return [r for r in self.results if not r.ok]

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            tail = f" ({r.counterexample})" if r.counterexample else ""
            out.append(f"{'PASS' if r.ok else 'FAIL'} {r.name} checked={r.checked}{tail}")
        return out


def _first_mismatch(ctx, got: np.ndarray, ix: np.ndarray, jx: np.ndarray, what: str) -> str:
    truth = ground_truth(ctx, ix, jx)
    bad = np.argwhere(got != truth)
    if not len(bad):
        return ""
    i, j = map(int, bad[0])
    u, v = ctx.verts[ix[i]], ctx.verts[jx[j]]
    return f"{what}: {u}<= {v} decided {bool(got[i, j])}, blocks {ctx.block[ix[i]]},{ctx.block[jx[j]]}"


def _claim_pair_types(ctx):
    phi, k = ctx.phi, ctx.k
    cells = all_cells(k)
    n = 0
    for c in cells:
        if pair_type(c, c, phi) == MIXED:
            return n, f"({c},{c}) is mixed"
    for c, d in iproduct(cells, cells):
        t = pair_type(c, d, phi)
        (i, X) = c
        for c2 in ((phi[i - 1], X), (i, preimage(phi, X))):
            n += 1
            if pair_type(c2, d, phi) != t:
                return n, f"type of ({c},{d}) changes when {c} becomes {c2}"
    return n, ""


def _claim_cell_projection(ctx):
    bp, phi = ctx.product, ctx.phi
    n = 0
    for v in ctx.verts:
        s = bp.block_of[v]
        i, X = bp.factor_cell(v)
        want = (i if s == bp.n else phi[i - 1], X if s == 1 else preimage(phi, X))
        n += 1
        if bp.composed.cell(v) != want:
            return n, f"vertex {v} of block {s}: cell {bp.composed.cell(v)}, expected {want}"
    return n, ""


def _claim_flip_equality(ctx):
    rebuilt = _per_cell_flip(ctx.AG, ctx.cell_of, ctx.Z)
    AZ = _adj_matrix(zflip(ctx.product.composed, ctx.Z), ctx.verts)
    for name, other in (("per-cell flip of G", rebuilt), ("Z-flip of the product", AZ)):
        if not np.array_equal(ctx.AH, other):
            i, j = map(int, np.argwhere(ctx.AH != other)[0])
            return ctx.AH.size, f"H and the {name} differ on ({ctx.verts[i]},{ctx.verts[j]})"
    return ctx.AH.size, ""


def _edge_scan(ctx, mask):
    a, b = np.nonzero(np.triu(ctx.AH & mask, 1))
    n = len(a)
    far = np.abs(ctx.block[a] - ctx.block[b]) > 1
    if far.any():
        i = int(np.flatnonzero(far)[0])
        u, v = ctx.verts[a[i]], ctx.verts[b[i]]
        return n, f"H-edge {u}-{v} joins blocks {ctx.block[a[i]]} and {ctx.block[b[i]]}"
    return n, ""


def _claim_locality(ctx):
    return _edge_scan(ctx, ~ctx.mixed_ix())


def _claim_local_solitary(ctx):
    sol = ~ctx.is_social_ix()
    return _edge_scan(ctx, sol[:, None] | sol[None, :])


def _mixed_pairs(ctx):
    return [(a, b) for a in sorted(ctx.M) for b in sorted(ctx.M[a])]


def _claim_distant_adjacency(ctx):
    n = 0
    for a, b in _mixed_pairs(ctx):
        Ua, Ub = ctx.U(a), ctx.U(b)
        dist = np.abs(ctx.block[Ua][:, None] - ctx.block[Ub][None, :]) > 1
        truth = ground_truth(ctx, Ua, Ub)
        bad = dist & (truth != _raw_before(ctx, a, b))
        n += int(dist.sum())
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            return n, f"cells {a},{b}: vertices {ctx.verts[Ua[i]]},{ctx.verts[Ub[j]]}"
    return n, ""


def _claim_pivot_sound(ctx):
    n = 0
    for a, b in _mixed_pairs(ctx):
        Ua = ctx.U(a)
        P = _pivots(ctx, a, b)
        strict = ctx.block[Ua][:, None] < ctx.block[Ua][None, :]
        n += int(P.sum())
        bad = P & ~strict
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            return n, f"pivot in U{b} for ({ctx.verts[Ua[i]]},{ctx.verts[Ua[j]]}) but blocks not increasing"
    return n, ""


def _claim_pivot_exists(ctx):
    n = 0
    for a, b in _mixed_pairs(ctx):
        Ua = ctx.U(a)
        P = _pivots(ctx, a, b)
        far = ctx.block[Ua][:, None] + 3 < ctx.block[Ua][None, :]
        n += int(far.sum())
        bad = far & ~P
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            return n, f"no pivot in U{b} for ({ctx.verts[Ua[i]]},{ctx.verts[Ua[j]]})"
    return n, ""


def _claim_mixed_order(ctx):
    n = 0
    for a, b in _mixed_pairs(ctx):
        if a > b:
            continue
        rel = interpret_mixed_order(a, b, ctx)
        n += rel.matrix.size
        msg = _first_mismatch(ctx, rel.matrix, rel.ix, rel.ix, f"pair {a},{b}")
        if msg:
            return n, msg
    return n, ""


def _claim_component_order(ctx):
    n = 0
    for C in ctx.social_components:
        rel = interpret_component_order(C, ctx)
        n += rel.matrix.size
        msg = _first_mismatch(ctx, rel.matrix, rel.ix, rel.ix, f"component {sorted(C)}")
        if msg:
            return n, msg
    return n, ""


def _claim_close_local(ctx):
    close = _closeness(ctx, np.arange(len(ctx.verts)))
    n = 0
    for s in range(1, ctx.n + 1):
        here = _closeness(ctx, np.flatnonzero(ctx.block == s))
        n += len(close)
        missing = close - here
        if missing:
            a, b = min(missing)
            return n, f"components {a},{b} are close but not inside block {s}"
    return n, ""


def _attachments(ctx, pool: np.ndarray) -> dict[int, set[int]]:
    """Solitary vertex -> social components reachable by a solitary path inside pool."""
    soc = ctx.is_social_ix()
    sc = _social_comp_ix(ctx)
    S = pool[~soc[pool]]
    T = pool[soc[pool]]
    lab = _labels(ctx.AH, S)
    out: dict[int, set[int]] = {}
    by_lab: dict[int, set[int]] = {}
    for l in set(lab.tolist()):
        members = S[lab == l]
        hit = T[ctx.AH[np.ix_(members, T)].any(axis=0)] if len(T) else T
        by_lab[l] = {int(sc[t]) for t in hit}
    for x, l in zip(S.tolist(), lab.tolist()):
        out[x] = by_lab[l]
    return out


def _claim_solitary_attach(ctx):
    glob = _attachments(ctx, np.arange(len(ctx.verts)))
    n = 0
    for s in range(1, ctx.n + 1):
        loc = _attachments(ctx, np.flatnonzero(np.abs(ctx.block - s) <= 1))
        for u in np.flatnonzero(ctx.block == s).tolist():
            if u not in glob:
                continue
            n += 1
            if glob[u] != loc[u]:
                return n, f"solitary vertex {ctx.verts[u]} reaches components {sorted(glob[u])} only globally"
    return n, ""


def _claim_one_cluster(ctx):
    sc = _social_comp_ix(ctx)
    n = 0
    for F in ctx.h_components:
        n += 1
        comps = {int(sc[ctx.index(v)]) for v in F} - {-1}
        cl = {_cluster_of_component(ctx, i) for i in comps}
        if len(cl) > 1:
            return n, f"H-component containing {F[0]} meets clusters {sorted(cl)}"
    return n, ""


def _claim_solitary_local(ctx):
    soc = ctx.is_social_ix()
    n = 0
    for F in ctx.h_components:
        Fi = np.array([ctx.index(v) for v in F])
        if soc[Fi].any():
            continue
        for s in sorted(set(ctx.block[Fi].tolist())):
            here = Fi[ctx.block[Fi] == s]
            if len(here) < 2:
                continue
            pool = np.flatnonzero(np.abs(ctx.block - s) <= 1)
            lab = _labels(ctx.AH, pool)
            pos = {int(x): p for p, x in enumerate(pool)}
            n += 1
            if len({int(lab[pos[int(x)]]) for x in here}) > 1:
                return n, f"block {s} of the component containing {F[0]} is split locally"
    return n, ""


def _claim_block_order(ctx):
    n = 0
    for F in ctx.h_components:
        rel = interpret_block_order_in_component(F, ctx)
        n += rel.matrix.size
        msg = _first_mismatch(ctx, rel.matrix, rel.ix, rel.ix, f"component of {F[0]}")
        if msg:
            return n, msg
    return n, ""


CLAIMS = {
    "pair-types": _claim_pair_types,
    "cell-projection": _claim_cell_projection,
    "flip-equality": _claim_flip_equality,
    "locality": _claim_locality,
    "local-solitary": _claim_local_solitary,
    "distant-adjacency": _claim_distant_adjacency,
    "pivot-sound": _claim_pivot_sound,
    "pivot-exists": _claim_pivot_exists,
    "mixed-order": _claim_mixed_order,
    "component-order": _claim_component_order,
    "close-local": _claim_close_local,
    "solitary-attach": _claim_solitary_attach,
    "one-cluster": _claim_one_cluster,
    "solitary-local": _claim_solitary_local,
    "block-order": _claim_block_order,
}


def claims_suite(ctx: OrderLabContext, names: Iterable[str] | None = None) -> ClaimsReport:
    names = list(CLAIMS) if names is None else list(names)
    unknown = [x for x in names if x not in CLAIMS]
    if unknown:
        raise InputError(f"unknown claim(s): {', '.join(unknown)}")
    out = []
    for name in names:
        try:
            n, msg = CLAIMS[name](ctx)
        except InvariantError as e:  # a procedure hit a state its hypotheses exclude
            out.append(ClaimResult(name, False, 0, f"invariant: {e}"))
            continue
        out.append(ClaimResult(name, not msg, n, msg))
    return ClaimsReport(out)


# ------------------------------------------------------------------ power generator

def _renamed(s: Derivation, offset: int) -> Derivation:
    return Derivation(s.G.relabeled(lambda v: v + offset), {v + offset: m for v, m in s.lam.items()}, s.phi)


def _power(s: Derivation, m: int) -> Derivation:
    width = max(s.G.vertex_set(), default=0)
    out = s
    for r in range(1, m):
        out = compose(out, _renamed(s, r * width))
    return out


def idempotent_power(s: Derivation, max_vertices: int = 6, max_exp: int = 12) -> Derivation | None:
    """Smallest power whose full abstraction is idempotent, if it fits the vertex budget."""
    base = _renamed(s, -min(s.G.vertex_set(), default=1) + 1)
    nv = len(base.G.vertex_set())
    if nv == 0:
        return None
    for m in range(1, max_exp + 1):
        if nv * m > max_vertices:
            return None
        tau = _power(base, m)
        if not is_idempotent(reduced(tau)):
            continue
        twice = compose(tau, _renamed(tau, nv * m))
        a1 = abstract(tau)
        a2 = abstract(twice, a1.zfamily)
        if a1.L == a2.L and a1.rho == a2.rho and a1.phi == a2.phi:
            return tau
    return None


def power_factors(tau: Derivation, n: int) -> list[Derivation]:
    if n < 1:
        raise InputError("n must be positive")
    width = max(tau.G.vertex_set())
    return [_renamed(tau, s * width) for s in range(n)]


def power_base(k: int, seed: int, max_base: int = 3, max_vertices: int = 6,
               attempts: int = 10_000) -> Derivation:
    """Idempotent power of the first random derivation (1..max_base vertices) that has one."""
    rng = rng_for(seed, 7)
    for _ in range(attempts):
        s = gen_derivation(rng, k, max_base, min_vertices=1)
        tau = idempotent_power(s, max_vertices)
        if tau is not None:
            return tau
    raise InputError(f"no idempotent power found for k={k} within {attempts} attempts")


def power_context(k: int, n: int, seed: int, max_base: int = 3, max_vertices: int = 6) -> OrderLabContext:
    """Context for n copies of an idempotent power of a random small derivation."""
    return build_context(power_factors(power_base(k, seed, max_base, max_vertices), n))


def k1_universe(max_vertices: int = 3) -> list[Derivation]:
    """Every 1-derivation on vertices 1..v, v <= max_vertices."""
    out = []
    for nv in range(1, max_vertices + 1):
        ids = list(range(1, nv + 1))
        pairs = list(combinations(ids, 2))
        for em in range(1 << len(pairs)):
            edges = [p for b, p in enumerate(pairs) if em >> b & 1]
            for pm in range(1 << nv):
                lam = {v: pm >> (v - 1) & 1 for v in ids}
                out.append(Derivation(ColoredGraph(1, {v: 1 for v in ids}, edges), lam, (1,)))
    return out
