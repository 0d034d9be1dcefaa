"""Linear word -> bounded-width clique term, driven by a factorization forest.

Every forest node carries the derivation of its segment and a term for it.
The term's output colors are *cell codes* of that derivation, so combining
two nodes never has to recover profiles from scratch: the Binary step is one
Join plus one Recolor, and the Idempotent step is a spine per component of
the positive-pair flip plus a root Join.  Two cell ranges are in use at any
time, so widths stay within ``2 * k * 2**k``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .abstraction import Reduced, positive_Z, reduced, reduced_compose, phi_is_idempotent
from .derivations import (Cell, Derivation, Phi, _preimage_table, cell_index, compose_phi,
                          identity_phi, mask_of, product)
from .errors import InputError, InvariantError, SemigroupTooLarge
from .factorization import FiniteSemigroupView, Node, build_forest, build_forest_greedy
from .graphs import connected_components
from .terms import (EMPTY, AddVertex, Const, LinearWord, Term, enforce_colors,
                    eval_term, eval_word, leaves, make_join, make_recolor, normalize,
                    restrict_many, width)

__all__ = [
    "DecomposeResult", "decompose", "verify_decomposition", "assemble_binary",
    "assemble_idempotent", "width_bound", "word_forest", "REDUCED_SEMIGROUP",
]

REDUCED_SEMIGROUP = FiniteSemigroupView(reduced_compose, name="reduced abstractions")


def _code(cell: Cell, k: int) -> int:
    return cell_index(cell, k) + 1


def _ncells(k: int) -> int:
    return k << k


def width_bound(k: int, depth: int) -> int:
    """Width guaranteed by the construction for a forest of the given depth."""
    return 1 if depth <= 1 else 2 * _ncells(k)


# ---------------------------------------------------------------- term steps
# Each step receives terms whose outputs are cell codes and the sets of cells
# they realize, and returns the same for the combined derivation.

def _binary_step(k: int, ts: Term, cs: set, phis: Phi, tt: Term, ct: set, phit: Phi) -> tuple[Term, set]:
    pre = _preimage_table(phis)
    if not ct:
        m = {_code(c, k): _code((phit[c[0] - 1], c[1]), k) for c in cs}
        return make_recolor(m, ts), {(phit[i - 1], X) for i, X in cs}
    if not cs:
        m = {_code(c, k): _code((c[0], pre[c[1]]), k) for c in ct}
        return make_recolor(m, tt), {(j, pre[Y]) for j, Y in ct}
    C = _ncells(k)
    shifted = make_recolor({_code(c, k): C + _code(c, k) for c in ct}, tt)
    pairs = [(_code(a, k), C + _code(b, k)) for a in cs for b in ct if b[1] >> (a[0] - 1) & 1]
    joined = make_join(pairs, (ts, shifted))
    m = {_code(a, k): _code((phit[a[0] - 1], a[1]), k) for a in cs}
    m.update({C + _code(b, k): _code((b[0], pre[b[1]]), k) for b in ct})
    out = {(phit[i - 1], X) for i, X in cs} | {(j, pre[Y]) for j, Y in ct}
    return make_recolor(m, joined), out


def _spine(k: int, phi: Phi, n: int, blocks: Sequence[tuple[int, Term, set]]) -> tuple[Term, set]:
    """Product of n blocks sharing the idempotent recoloring ``phi``.

    ``blocks`` lists (index, term, cells) for the blocks that are nonempty
    here, indices 0-based and increasing; all other blocks are vertexless.
    """
    C = _ncells(k)
    pre = _preimage_table(phi)
    idx0, t0, c0 = blocks[0]
    if idx0 > 0:
        m = {_code(c, k): _code((c[0], pre[c[1]]), k) for c in c0}
        P, cells = make_recolor(m, t0), {(c[0], pre[c[1]]) for c in c0}
    else:
        P, cells = t0, set(c0)
    last = idx0
    for idx, t, cb in blocks[1:]:
        if idx > last + 1:  # vertexless blocks in between recolor the prefix
            P = make_recolor({_code(c, k): _code((phi[c[0] - 1], c[1]), k) for c in cells}, P)
            cells = {(phi[c[0] - 1], c[1]) for c in cells}
        shifted = make_recolor({_code(c, k): C + _code(c, k) for c in cb}, t)
        pairs = [(_code(a, k), C + _code(b, k)) for a in cells for b in cb if b[1] >> (a[0] - 1) & 1]
        joined = make_join(pairs, (P, shifted))
        m = {_code(a, k): _code((phi[a[0] - 1], a[1]), k) for a in cells}
        m.update({C + _code(b, k): _code((b[0], pre[b[1]]), k) for b in cb})
        P = make_recolor(m, joined)
        cells = {(phi[a[0] - 1], a[1]) for a in cells} | {(b[0], pre[b[1]]) for b in cb}
        last = idx
    if last < n - 1:
        P = make_recolor({_code(c, k): _code((phi[c[0] - 1], c[1]), k) for c in cells}, P)
        cells = {(phi[c[0] - 1], c[1]) for c in cells}
    return P, cells


def _root_join(k: int, Z: Iterable[tuple[Cell, Cell]], parts: Sequence[tuple[Term, set]]) -> tuple[Term, set]:
    cells = set().union(*(c for _, c in parts)) if parts else set()
    if len(parts) == 1:
        return parts[0][0], cells
    pairs = [(_code(c, k), _code(d, k)) for c, d in Z if c in cells and d in cells]
    return make_join(pairs, [t for t, _ in parts]), cells


def _to_colors(k: int, t: Term, cells: Iterable[Cell]) -> Term:
    return make_recolor({_code(c, k): c[0] for c in cells}, t)


# ---------------------------------------------------------------- public assembly

def _enforce_cells(t: Term, s: Derivation, offset: int = 0) -> Term:
    k = s.k
    parts = {v: _code(s.cell(v), k) for v in s.G.vertex_set()}
    return enforce_colors(t, parts, offset)


def _require_graph(t: Term, s: Derivation, what: str):
    g = eval_term(t, k=max(s.k, 1) + 10**6)
    if not g.uncolored_equal(s.G):
        raise InputError(f"{what} does not evaluate to the underlying graph of its derivation")


def assemble_binary(s: Derivation, tau: Derivation, ts: Term, tt: Term,
                    output: str = "colors", check: bool = True) -> Term:
    """Term for ``s * tau`` from terms of the factors (any output colors)."""
    if s.k != tau.k:
        raise InputError("factors of different width")
    if check:
        _require_graph(ts, s, "left term")
        _require_graph(tt, tau, "right term")
    k = s.k
    es = _enforce_cells(ts, s) if len(s.G) else EMPTY
    et = _enforce_cells(tt, tau) if len(tau.G) else EMPTY
    t, cells = _binary_step(k, es, set(s.nonempty_cells()), s.phi, et, set(tau.nonempty_cells()), tau.phi)
    return _to_colors(k, t, cells) if output == "colors" else t


def _check_idempotent_family(factors: Sequence[Derivation]) -> Reduced:
    if not factors:
        raise InputError("no factors")
    e = reduced(factors[0])
    for f in factors[1:]:
        if f.k != factors[0].k:
            raise InputError("factors of different width")
        if reduced(f) != e:
            raise InputError("factors do not share one reduced abstraction")
    if not phi_is_idempotent(e.phi):
        raise InputError("shared recoloring is not idempotent")
    return e


def assemble_idempotent(factors: Sequence[Derivation], terms: Sequence[Term],
                        output: str = "colors", check: bool = True) -> Term:
    """Term for the product of factors sharing an idempotent reduced abstraction."""
    if len(factors) != len(terms):
        raise InputError("one term per factor is required")
    e = _check_idempotent_family(factors)
    k = factors[0].k
    if check:
        for i, (f, t) in enumerate(zip(factors, terms)):
            _require_graph(t, f, f"term {i + 1}")
    prod = product(factors)
    enforced = [_enforce_cells(t, f) if len(f.G) else EMPTY for f, t in zip(factors, terms)]
    cell_of = [{v: f.cell(v) for v in f.G.vertex_set()} for f in factors]
    Z = positive_Z(e.cells(), e.phi)
    t, cells = _idempotent_core(k, e.phi, Z, prod, enforced, cell_of, check)
    return _to_colors(k, t, cells) if output == "colors" else t


def _idempotent_core(k, phi, Z, prod: Derivation, terms, cell_of, check) -> tuple[Term, set]:
    from .derivations import zflip
    H = zflip(prod, Z)
    comps = connected_components(H)
    comp_id = {v: i for i, comp in enumerate(comps) for v in comp}
    if check:
        _check_cross_edges(prod, comp_id, Z)
    per_comp: list[list[tuple[int, Term, set]]] = [[] for _ in comps]
    for b, (t, cells) in enumerate(zip(terms, cell_of)):
        if not cells:
            continue
        pieces = restrict_many(t, {v: comp_id[v] for v in cells})
        for cid, sub in pieces.items():
            cs = {cells[v] for v in comps[cid] if v in cells}
            per_comp[cid].append((b, sub, cs))
    parts = [_spine(k, phi, len(terms), blocks) for blocks in per_comp if blocks]
    if not parts:
        return EMPTY, set()
    return _root_join(k, Z, parts)


def _check_cross_edges(prod: Derivation, comp_id: Mapping[int, int], Z) -> None:
    Zs = set(Z)
    vs = sorted(comp_id)
    for i, u in enumerate(vs):
        cu = prod.cell(u)
        for v in vs[i + 1:]:
            if comp_id[u] == comp_id[v]:
                continue
            cv = prod.cell(v)
            key = (cu, cv) if cu <= cv else (cv, cu)
            if prod.G.has_edge(u, v) != (key in Zs):
                raise InvariantError(f"cross-component pair {u},{v} breaks the flip identity")


# ---------------------------------------------------------------- pipeline

@dataclass
class DecomposeResult:
    term: Term
    width: int
    forest_depth: int
    per_level_widths: list[int]
    k: int
    forest_method: str
    forest_bound: int | None
    width_bound: int | None
    stats: dict = field(default_factory=dict)


@dataclass
class _Seg:
    idx: np.ndarray  # vertex positions into the word's vertex list
    color: np.ndarray
    prof: np.ndarray
    phi: Phi
    term: Term

    def cells(self) -> set:
        if not len(self.idx):
            return set()
        return set(zip(self.color.tolist(), self.prof.tolist()))


class _Pipeline:
    def __init__(self, w: LinearWord, check: bool, mode: str = "cells"):
        if mode not in ("cells", "colors"):
            raise InputError(f"unknown assembly mode {mode!r}")
        self.k = k = w.k
        self.check = check
        self.mode = mode
        self.ids = w.vertices()
        pos = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)
        G = eval_word(w)
        A = np.zeros((n, n), dtype=bool)
        for u, v in G.edges:
            A[pos[u], pos[v]] = A[pos[v], pos[u]] = True
        self.G, self.A, self.pos = G, A, pos
        w2 = 1 << k
        self.cellmask = w2
        self.stats = {"binary": 0, "idempotent": 0, "components": 0}

    def leaf(self, ins) -> _Seg:
        k = self.k
        if isinstance(ins, AddVertex):
            m = mask_of(ins.profile)
            c = ins.color if self.mode == "colors" else _code((ins.color, m), k)
            return _Seg(np.array([self.pos[ins.vertex]]), np.array([ins.color]), np.array([m]),
                        identity_phi(k), Const(c, ins.vertex))
        e = np.array([], dtype=int)
        return _Seg(e, e, e, tuple(ins.images), EMPTY)

    def _cell_term(self, g: _Seg) -> Term:
        # colors mode: split the output colors of the child into its cells
        if self.mode == "cells" or not len(g.idx):
            return g.term
        parts = {self.ids[p]: _code((c, m), self.k)
                 for p, c, m in zip(g.idx.tolist(), g.color.tolist(), g.prof.tolist())}
        return enforce_colors(g.term, parts)

    def _finish(self, t: Term, seg: _Seg) -> Term:
        if self.mode == "cells":
            return t
        return _to_colors(self.k, t, seg.cells())

    def binary(self, a: _Seg, b: _Seg) -> _Seg:
        self.stats["binary"] += 1
        t, _ = _binary_step(self.k, self._cell_term(a), a.cells(), a.phi, self._cell_term(b), b.cells(), b.phi)
        phib = np.array((0,) + b.phi)
        pre = np.array(_preimage_table(a.phi))
        seg = _Seg(np.concatenate([a.idx, b.idx]),
                   np.concatenate([phib[a.color] if len(a.idx) else a.color, b.color]),
                   np.concatenate([a.prof, pre[b.prof] if len(b.idx) else b.prof]),
                   compose_phi(b.phi, a.phi), t)
        seg.term = self._finish(t, seg)
        return seg

    def idempotent(self, segs: list[_Seg]) -> _Seg:
        self.stats["idempotent"] += 1
        k = self.k
        phi = segs[0].phi
        if not phi_is_idempotent(phi) or any(s.phi != phi for s in segs):
            raise InvariantError("idempotent node children disagree on an idempotent recoloring")
        phia = np.array((0,) + phi)
        pre = np.array(_preimage_table(phi))
        last = len(segs) - 1
        idx, col, prof = [], [], []
        for s, g in enumerate(segs):
            if not len(g.idx):
                continue
            idx.append(g.idx)
            col.append(phia[g.color] if s < last else g.color)
            prof.append(pre[g.prof] if s > 0 else g.prof)
        if not idx:
            return _Seg(segs[0].idx, segs[0].color, segs[0].prof, phi, EMPTY)
        idx_a, col_a, prof_a = np.concatenate(idx), np.concatenate(col), np.concatenate(prof)
        e_cells = set(zip(col_a.tolist(), prof_a.tolist()))
        Z = positive_Z(e_cells, phi)
        # flip on product cells, then components
        code = (col_a - 1) * self.cellmask + prof_a
        nc = _ncells(k)
        Zm = np.zeros((nc, nc), dtype=bool)
        for c, d in Z:
            i, j = cell_index(c, k), cell_index(d, k)
            Zm[i, j] = Zm[j, i] = True
        H = self.A[np.ix_(idx_a, idx_a)] ^ Zm[np.ix_(code, code)]
        np.fill_diagonal(H, False)
        ncomp, lab = _cc(csr_matrix(H), directed=False)
        self.stats["components"] += int(ncomp)
        if self.check:
            same = lab[:, None] == lab[None, :]
            G_sub = self.A[np.ix_(idx_a, idx_a)]
            cross_ok = (G_sub == Zm[np.ix_(code, code)]) | same
            np.fill_diagonal(cross_ok, True)
            if not cross_ok.all():
                raise InvariantError("cross-component adjacency breaks the flip identity")
        label_of = {self.ids[p]: int(c) for p, c in zip(idx_a.tolist(), lab.tolist())}
        per_comp: list[list[tuple[int, Term, set]]] = [[] for _ in range(ncomp)]
        for b, g in enumerate(segs):
            if not len(g.idx):
                continue
            vid = [self.ids[p] for p in g.idx.tolist()]
            cell_of = dict(zip(vid, zip(g.color.tolist(), g.prof.tolist())))
            pieces = restrict_many(self._cell_term(g), {v: label_of[v] for v in vid})
            by_comp: dict[int, set] = {}
            for v in vid:
                by_comp.setdefault(label_of[v], set()).add(cell_of[v])
            for cid, sub in pieces.items():
                per_comp[cid].append((b, sub, by_comp[cid]))
        parts = [_spine(k, phi, len(segs), blocks) for blocks in per_comp if blocks]
        t, _ = _root_join(k, Z, parts)
        seg = _Seg(idx_a, col_a, prof_a, phi, t)
        seg.term = self._finish(t, seg)
        return seg

    def verify_node(self, seg: _Seg):
        g = eval_term(seg.term, k=10**6)
        ids = [self.ids[p] for p in seg.idx.tolist()]
        if sorted(g.vertices) != sorted(ids):
            raise InvariantError("node term has the wrong vertex set")
        sub = self.G.induced(ids)
        if not g.uncolored_equal(sub):
            raise InvariantError("node term has the wrong edges")
        for v, c, m in zip(ids, seg.color.tolist(), seg.prof.tolist()):
            want = c if self.mode == "colors" else _code((c, m), self.k)
            if g.color(v) != want:
                raise InvariantError(f"vertex {v} carries the wrong cell code")


def _forest(images: list[Reduced], k: int, cap: int, green_max_k: int):
    if k <= green_max_k:
        try:
            return build_forest(images, REDUCED_SEMIGROUP, cap=cap, cache_key=("reduced", k))
        except SemigroupTooLarge:
            pass
    return build_forest_greedy(images, REDUCED_SEMIGROUP)


def word_forest(w: LinearWord, cap: int = 200_000, green_max_k: int = 2):
    """Factorization forest of the reduced abstractions of the word's letters."""
    if not w.instructions:
        raise InputError("empty word has no forest")
    return _forest([reduced(_atomic(w.k, x)) for x in w.instructions], w.k, cap, green_max_k)


def decompose(w: LinearWord, check: bool = False, cap: int = 200_000, green_max_k: int = 2,
              mode: str = "cells") -> DecomposeResult:
    """Bounded-width term for the graph of ``w``.

    ``mode="cells"`` keeps cell codes as node outputs (width at most
    2k*2^k); ``mode="colors"`` keeps plain colors and re-splits them into
    cells at every node, which is closer to a by-the-book construction but
    lets width grow with forest depth.

    ``green_max_k``: largest k for which the Green-class forest is attempted;
    beyond it (or past ``cap`` elements) the greedy forest is used.
    """
    if not w.instructions:
        raise InputError("cannot decompose an empty word")
    t0 = time.perf_counter()
    k = w.k
    ins = w.instructions
    images = [reduced(_atomic(k, x)) for x in ins]
    forest = _forest(images, k, cap, green_max_k)
    pipe = _Pipeline(w, check, mode)
    level_w: dict[int, int] = {}
    done: dict[int, tuple[_Seg, int]] = {}
    stack: list[tuple[Node, bool]] = [(forest.root, False)]
    while stack:
        node, ready = stack.pop()
        if not ready:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))
            continue
        if node.kind == "leaf":
            seg, h = pipe.leaf(ins[node.pos]), 1
        else:
            kids = [done.pop(id(c)) for c in node.children]
            h = 1 + max(x[1] for x in kids)
            if node.kind == "binary":
                seg = pipe.binary(kids[0][0], kids[1][0])
            else:
                seg = pipe.idempotent([x[0] for x in kids])
        if check:
            pipe.verify_node(seg)
        level_w[h] = max(level_w.get(h, 0), width(seg.term))
        done[id(node)] = (seg, h)
    root_seg, depth = done[id(forest.root)]
    term = normalize(root_seg.term)
    per_level = [level_w.get(h, 0) for h in range(1, depth + 1)]
    stats = dict(pipe.stats)
    stats["seconds"] = time.perf_counter() - t0
    stats["semigroup_size"] = forest.semigroup_size
    bound = width_bound(k, depth) if mode == "cells" else None
    return DecomposeResult(term, width(term), depth, per_level, k, forest.method, forest.bound,
                           bound, stats)


def _atomic(k: int, ins):
    from .derivations import _atomic_of
    return _atomic_of(k, ins)


class VerifyReport:
    def __init__(self, ok: bool, message: str = ""):
        self.ok, self.message = ok, message

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "VerifyReport(ok)" if self.ok else f"VerifyReport(fail: {self.message})"


def verify_decomposition(w: LinearWord, r: DecomposeResult | Term) -> VerifyReport:
    """Leaf ids equal the word's vertices and edges match exactly."""
    t = r.term if isinstance(r, DecomposeResult) else r
    G = eval_word(w)
    try:
        lv = leaves(t)
        if len(lv) != len(set(lv)):
            return VerifyReport(False, "a vertex id labels two leaves")
        if set(lv) != G.vertex_set():
            miss = sorted(G.vertex_set() - set(lv))[:5]
            extra = sorted(set(lv) - G.vertex_set())[:5]
            return VerifyReport(False, f"leaf ids differ from vertices (missing {miss}, extra {extra})")
        H = eval_term(t, k=max(10**6, 1))
    except InputError as exc:
        return VerifyReport(False, str(exc))
    if H.edge_set() != G.edge_set():
        d = sorted(H.edge_set() ^ G.edge_set())[:5]
        return VerifyReport(False, f"edge sets differ, e.g. {d}")
    return VerifyReport(True)
