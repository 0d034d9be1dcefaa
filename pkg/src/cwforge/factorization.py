"""Factorization forests over finite semigroups.

The main builder materializes the subsemigroup generated by the input images
and recurses on Green's J-classes:

* cut the word into shortest pieces whose value falls in the J-class of the
  total; each piece is a strictly-higher prefix times one letter,
* the pieces form a sequence whose every infix stays in that J-class; cut it
  at one boundary type (L-class of the left piece, R-class of the right one),
  which makes the middle segments live in a group H-class,
* group sequences are split at every occurrence of one prefix value, which
  turns the middle into a run of identity-valued segments.

Each step removes a J-class, a boundary type, or a prefix value, so depth is
bounded by a function of the semigroup alone.  ``depth_bound`` is the bound
that this particular recursion guarantees.

When the closure exceeds its cap, ``build_forest_greedy`` offers a
multiplication-only fallback with no size-independent guarantee.
"""
from __future__ import annotations

import hashlib
import random
import sys
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError, SemigroupTooLarge

__all__ = [
    "FiniteSemigroupView", "Node", "Forest", "ForestCheck", "GreenStructure",
    "build_forest", "build_forest_greedy", "green_for", "verify_forest", "forest_depth",
    "dump_forest", "parse_forest", "image_hash",
]

DEFAULT_CAP = 10**6


class FiniteSemigroupView:
    """Product plus optional carrier; elements must be hashable."""

    def __init__(self, mul: Callable, carrier: Iterable[Hashable] | None = None, name: str = ""):
        self.mul = mul
        self.carrier = None if carrier is None else list(carrier)
        self.name = name

    def is_idempotent(self, e) -> bool:
        return self.mul(e, e) == e

    def product(self, xs: Sequence):
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.mul(acc, x)
        return acc


# ---------------------------------------------------------------- nodes

@dataclass(eq=False, slots=True)
class Node:
    kind: str  # "leaf" | "binary" | "idempotent"
    image: Hashable
    children: tuple = ()
    pos: int = -1  # leaf position, 0-based

    @property
    def depth(self) -> int:
        return forest_depth(self)


def forest_depth(root: Node) -> int:
    best = 0
    stack = [(root, 1)]
    while stack:
        n, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in n.children)
    return best


def leaf_positions(root: Node) -> list[int]:
    out = []
    stack = [root]
    while stack:
        n = stack.pop()
        if n.kind == "leaf":
            out.append(n.pos)
        else:
            stack.extend(reversed(n.children))
    return out


@dataclass
class Forest:
    root: Node
    depth: int
    bound: int | None
    semigroup_size: int | None
    method: str
    stats: dict = field(default_factory=dict)


def _join(sg: FiniteSemigroupView, a: Node, b: Node) -> Node:
    """Binary product, promoted to an idempotent node when both sides share an idempotent image."""
    if a.image == b.image and sg.is_idempotent(a.image):
        kids = []
        for x in (a, b):
            if x.kind == "idempotent" and x.image == a.image:
                kids.extend(x.children)
            else:
                kids.append(x)
        return Node("idempotent", a.image, tuple(kids))
    return Node("binary", sg.mul(a.image, b.image), (a, b))


def _idem(sg: FiniteSemigroupView, parts: list[Node]) -> Node:
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return _join(sg, parts[0], parts[1])
    kids = []
    for x in parts:
        if x.kind == "idempotent" and x.image == parts[0].image:
            kids.extend(x.children)
        else:
            kids.append(x)
    return Node("idempotent", parts[0].image, tuple(kids))


def _chain(sg: FiniteSemigroupView, parts: Iterable[Node | None]) -> Node:
    acc = None
    for p in parts:
        if p is None:
            continue
        acc = p if acc is None else _join(sg, acc, p)
    assert acc is not None
    return acc


# ---------------------------------------------------------------- Green structure

class GreenStructure:
    """Closure of a generating set with its R, L, J classes and J-order."""

    def __init__(self, sg: FiniteSemigroupView, gens: Iterable[Hashable], cap: int = DEFAULT_CAP,
                 check_assoc: int = 200, seed: int = 0):
        gens = list(dict.fromkeys(gens))
        if not gens:
            raise InputError("empty generating set")
        mul = sg.mul
        elems: list = list(gens)
        index = {g: i for i, g in enumerate(elems)}
        right: list[list[int]] = []
        left: list[list[int]] = []
        i = 0
        while i < len(elems):
            x = elems[i]
            rrow, lrow = [], []
            for g in gens:
                for prod, row in ((mul(x, g), rrow), (mul(g, x), lrow)):
                    j = index.get(prod)
                    if j is None:
                        j = index[prod] = len(elems)
                        elems.append(prod)
                        if len(elems) > cap:
                            raise SemigroupTooLarge(f"generated subsemigroup exceeds {cap} elements")
                    row.append(j)
            right.append(rrow)
            left.append(lrow)
            i += 1
        self.sg = sg
        self.gens = gens
        self.elems = elems
        self.index = index
        n = len(elems)
        m = len(gens)
        src = np.repeat(np.arange(n), m)
        R = csr_matrix((np.ones(n * m, dtype=np.int8), (src, np.asarray(right).ravel())), shape=(n, n))
        Lm = csr_matrix((np.ones(n * m, dtype=np.int8), (src, np.asarray(left).ravel())), shape=(n, n))
        _, self.r_of = connected_components(R, directed=True, connection="strong")
        _, self.l_of = connected_components(Lm, directed=True, connection="strong")
        nj, self.j_of = connected_components(R + Lm, directed=True, connection="strong")
        self.num_j = nj
        self._check_assoc(check_assoc, seed)
        self._j_order(right, left)
        self._class_sizes()

    def _check_assoc(self, samples: int, seed: int):
        rng = random.Random(seed)
        mul = self.sg.mul
        n = len(self.elems)
        total = n ** 3
        if total <= samples:
            triples = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]
        else:
            triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(samples)]
        for a, b, c in triples:
            x, y, z = self.elems[a], self.elems[b], self.elems[c]
            if mul(mul(x, y), z) != mul(x, mul(y, z)):
                raise InputError(f"product is not associative on ({x!r}, {y!r}, {z!r})")

    def _j_order(self, right, left):
        nj = self.num_j
        succ: list[set[int]] = [set() for _ in range(nj)]
        for a, (rr, ll) in enumerate(zip(right, left)):
            ja = self.j_of[a]
            for b in rr + ll:
                jb = self.j_of[b]
                if jb != ja:
                    succ[ja].add(jb)
        self.j_succ = succ
        indeg = [0] * nj
        for s in succ:
            for t in s:
                indeg[t] += 1
        order = [j for j in range(nj) if indeg[j] == 0]
        for j in order:
            for t in succ[j]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    order.append(t)
        self.j_topo = order  # higher classes first

    def _class_sizes(self):
        self.j_members: dict[int, list[int]] = {}
        for i, j in enumerate(self.j_of):
            self.j_members.setdefault(int(j), []).append(i)
        self.j_regular: dict[int, bool] = {}
        self.j_rl: dict[int, tuple[int, int]] = {}
        self.j_h: dict[int, int] = {}
        mul = self.sg.mul
        for j, mem in self.j_members.items():
            rs = {int(self.r_of[i]) for i in mem}
            ls = {int(self.l_of[i]) for i in mem}
            hs: dict[tuple[int, int], int] = {}
            for i in mem:
                key = (int(self.r_of[i]), int(self.l_of[i]))
                hs[key] = hs.get(key, 0) + 1
            self.j_rl[j] = (len(rs), len(ls))
            self.j_h[j] = max(hs.values())
            self.j_regular[j] = any(mul(self.elems[i], self.elems[i]) == self.elems[i] for i in mem)

    # -- per-element lookups
    def J(self, x) -> int:
        return int(self.j_of[self.index[x]])

    def R(self, x) -> int:
        return int(self.r_of[self.index[x]])

    def L(self, x) -> int:
        return int(self.l_of[self.index[x]])

    def __len__(self):
        return len(self.elems)

    # -- depth accounting
    def group_extra(self, h: int) -> int:
        # a group run with at most h distinct prefix values adds at most 3h - 1 levels
        return 3 * h - 1

    def smooth_extra(self, j: int) -> int:
        if not self.j_regular[j]:
            return 0
        r, l = self.j_rl[j]
        return r * l * (self.group_extra(self.j_h[j]) + 2)

    def depth_bounds(self) -> dict[int, int]:
        """Guaranteed depth for a word whose total lies in each J-class."""
        up = [0] * self.num_j
        D = [0] * self.num_j
        for j in self.j_topo:
            D[j] = max(1, up[j] + 1) + self.smooth_extra(j) + 1
            for t in self.j_succ[j]:
                up[t] = max(up[t], D[j], up[j])
        return {j: D[j] for j in range(self.num_j)}

    def max_bound(self) -> int:
        return max(self.depth_bounds().values())


# ---------------------------------------------------------------- Green-based builder

class _Builder:
    def __init__(self, gs: GreenStructure):
        self.gs = gs
        self.sg = gs.sg

    def word(self, items: list[Node]) -> Node:
        if len(items) == 1:
            return items[0]
        gs, mul = self.gs, self.sg.mul
        total = self.sg.product([x.image for x in items])
        j0 = gs.J(total)
        pieces: list[Node] = []
        start = 0
        acc = None
        for i, x in enumerate(items):
            acc = x.image if acc is None else mul(acc, x.image)
            if gs.J(acc) == j0:
                head = items[start:i]
                piece = x if not head else _join(self.sg, self.word(head), x)
                pieces.append(piece)
                start = i + 1
                acc = None
        rest = self.word(items[start:]) if start < len(items) else None
        return _chain(self.sg, [self.smooth(pieces), rest])

    def smooth(self, items: list[Node]) -> Node:
        if len(items) == 1:
            return items[0]
        gs = self.gs
        types = [(gs.L(items[i].image), gs.R(items[i + 1].image)) for i in range(len(items) - 1)]
        beta = types[0]
        cuts = [i for i, t in enumerate(types) if t == beta]  # cut after item i
        segs: list[list[Node]] = []
        prev = 0
        for c in cuts:
            segs.append(items[prev:c + 1])
            prev = c + 1
        segs.append(items[prev:])
        head = self.smooth(segs[0])
        middle = [self.smooth(s) for s in segs[1:-1]]
        tail = self.smooth(segs[-1])
        return _chain(self.sg, [head, self.group(middle) if middle else None, tail])

    def group(self, items: list[Node]) -> Node:
        if len(items) == 1:
            return items[0]
        mul = self.sg.mul
        prefix = []
        acc = None
        for x in items:
            acc = x.image if acc is None else mul(acc, x.image)
            prefix.append(acc)
        h = prefix[-1]
        hits = [i for i, p in enumerate(prefix) if p == h]
        first = hits[0]
        a = items[first] if first == 0 else _join(self.sg, self.group(items[:first]), items[first])
        blocks = []
        for s, t in zip(hits, hits[1:]):
            seg = items[s + 1:t + 1]
            blocks.append(seg[0] if len(seg) == 1 else _join(self.sg, self.group(seg[:-1]), seg[-1]))
        if not blocks:
            return a
        return _join(self.sg, a, _idem(self.sg, blocks))


_GREEN_CACHE: dict[tuple, GreenStructure] = {}


def green_for(sg: FiniteSemigroupView, gens: Iterable[Hashable], cap: int = DEFAULT_CAP,
              cache_key: Hashable | None = None) -> GreenStructure:
    """Green structure of the closure of ``gens``, memoized per (key, generator set)."""
    gens = frozenset(gens)
    key = (cache_key, gens) if cache_key is not None else None
    if key is not None and key in _GREEN_CACHE:
        return _GREEN_CACHE[key]
    gs = GreenStructure(sg, sorted(gens, key=repr), cap=cap)
    if key is not None:
        _GREEN_CACHE[key] = gs
    return gs


def build_forest(images: Sequence[Hashable], sg: FiniteSemigroupView, cap: int = DEFAULT_CAP,
                 cache_key: Hashable | None = None) -> Forest:
    """Forest over ``images`` using the Green-class recursion."""
    if not images:
        raise InputError("cannot factorize an empty sequence")
    gs = green_for(sg, images, cap=cap, cache_key=cache_key)
    leaves = [Node("leaf", x, (), i) for i, x in enumerate(images)]
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        root = _Builder(gs).word(leaves)
    finally:
        sys.setrecursionlimit(old)
    total = root.image
    bound = 1 if len(images) == 1 else gs.depth_bounds()[gs.J(total)]
    return Forest(root, forest_depth(root), bound, len(gs), "green",
                  {"j_classes": gs.num_j, "max_bound": gs.max_bound()})


def build_forest_greedy(images: Sequence[Hashable], sg: FiniteSemigroupView) -> Forest:
    """Fallback that only multiplies: idempotent runs when the total allows, halving otherwise."""
    if not images:
        raise InputError("cannot factorize an empty sequence")
    leaves = [Node("leaf", x, (), i) for i, x in enumerate(images)]

    def go(items: list[Node]) -> Node:
        if len(items) == 1:
            return items[0]
        total = sg.product([x.image for x in items])
        if sg.is_idempotent(total):
            segs, start, acc = [], 0, None
            for i, x in enumerate(items):
                acc = x.image if acc is None else sg.mul(acc, x.image)
                if acc == total:
                    segs.append(items[start:i + 1])
                    start, acc = i + 1, None
            tail = items[start:]
            if len(segs) >= 2:
                body = _idem(sg, [go(s) for s in segs])
                return _join(sg, body, go(tail)) if tail else body
        mid = len(items) // 2
        return _join(sg, go(items[:mid]), go(items[mid:]))

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        root = go(leaves)
    finally:
        sys.setrecursionlimit(old)
    return Forest(root, forest_depth(root), None, None, "greedy")


# ---------------------------------------------------------------- verification

class ForestCheck:
    def __init__(self, ok: bool, path: tuple = (), message: str = ""):
        self.ok, self.path, self.message = ok, path, message

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "ForestCheck(ok)" if self.ok else f"ForestCheck(fail at {list(self.path)}: {self.message})"


def verify_forest(root: Node, images: Sequence[Hashable], sg: FiniteSemigroupView) -> ForestCheck:
    """Structural and image checks; the failure carries the child-index path to the bad node."""
    expect: list[int] = []
    computed: dict[int, Hashable] = {}
    stack: list[tuple[Node, tuple, bool]] = [(root, (), False)]
    while stack:
        n, path, done = stack.pop()
        if not done:
            stack.append((n, path, True))
            for i in reversed(range(len(n.children))):
                stack.append((n.children[i], path + (i,), False))
            continue
        if n.kind == "leaf":
            if n.children:
                return ForestCheck(False, path, "leaf with children")
            if not 0 <= n.pos < len(images):
                return ForestCheck(False, path, f"leaf position {n.pos} out of range")
            expect.append(n.pos)
            img = images[n.pos]
        elif n.kind == "binary":
            if len(n.children) != 2:
                return ForestCheck(False, path, "binary node without exactly two children")
            img = sg.mul(computed[id(n.children[0])], computed[id(n.children[1])])
        elif n.kind == "idempotent":
            if len(n.children) < 2:
                return ForestCheck(False, path, "idempotent node with fewer than two children")
            imgs = [computed[id(c)] for c in n.children]
            if any(x != imgs[0] for x in imgs):
                return ForestCheck(False, path, "idempotent node children differ in image")
            if not sg.is_idempotent(imgs[0]):
                return ForestCheck(False, path, "idempotent node image is not idempotent")
            img = imgs[0]
        else:
            return ForestCheck(False, path, f"unknown node kind {n.kind!r}")
        if n.image != img:
            return ForestCheck(False, path, "stored image disagrees with recomputed product")
        computed[id(n)] = img
    if expect != list(range(len(images))):
        return ForestCheck(False, (), "leaves are not positions 1..n in order")
    return ForestCheck(True)


# ---------------------------------------------------------------- text form

def image_hash(x: Hashable) -> str:
    return hashlib.sha1(repr(x).encode()).hexdigest()[:10]


def dump_forest(root: Node) -> str:
    lines = []
    stack = [(root, 0)]
    while stack:
        n, d = stack.pop()
        pad = "  " * d
        if n.kind == "leaf":
            lines.append(f"{pad}L {n.pos + 1}")
        elif n.kind == "binary":
            lines.append(f"{pad}B")
        else:
            lines.append(f"{pad}I {image_hash(n.image)}")
        stack.extend((c, d + 1) for c in reversed(n.children))
    return "\n".join(lines) + "\n"


def parse_forest(text: str, images: Sequence[Hashable], sg: FiniteSemigroupView) -> Node:
    """Rebuild a forest from its dump; images are recomputed from ``images``."""
    rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2:
            raise InputError("odd indentation", ln)
        parts = raw.split()
        if parts[0] == "L" and len(parts) == 2 and parts[1].isdigit():
            rows.append((indent // 2, "leaf", int(parts[1]) - 1, ln))
        elif parts[0] == "B" and len(parts) == 1:
            rows.append((indent // 2, "binary", None, ln))
        elif parts[0] == "I" and len(parts) == 2:
            rows.append((indent // 2, "idempotent", parts[1], ln))
        else:
            raise InputError(f"unrecognized forest line {raw.strip()!r}", ln)
    if not rows:
        raise InputError("empty forest")
    pos = 0

    def build(depth: int) -> Node:
        nonlocal pos
        d, kind, arg, ln = rows[pos]
        if d != depth:
            raise InputError("bad indentation", ln)
        pos += 1
        if kind == "leaf":
            if not 0 <= arg < len(images):
                raise InputError(f"leaf position {arg + 1} out of range", ln)
            return Node("leaf", images[arg], (), arg)
        kids = []
        while pos < len(rows) and rows[pos][0] == depth + 1:
            kids.append(build(depth + 1))
        if not kids:
            raise InputError("inner node without children", ln)
        if kind == "binary":
            if len(kids) != 2:
                raise InputError("binary node needs two children", ln)
            return Node("binary", sg.mul(kids[0].image, kids[1].image), tuple(kids))
        if arg != image_hash(kids[0].image):
            raise InputError(f"idempotent node hash {arg} does not match its children", ln)
        return Node("idempotent", kids[0].image, tuple(kids))

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        root = build(0)
    finally:
        sys.setrecursionlimit(old)
    if pos != len(rows):
        raise InputError("trailing lines after the root", rows[pos][3])
    return root
