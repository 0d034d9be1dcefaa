"""Clique terms, linear words, and the term rewrites the decomposer relies on.

Terms can be thousands of levels deep (spines, linear embeddings), so every
traversal here is iterative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError
from .graphs import ColoredGraph

__all__ = [
    "Empty", "Const", "Recolor", "Join", "Term", "EMPTY",
    "AddVertex", "RecolorInstr", "Instruction", "LinearWord",
    "postorder", "leaves", "eval_term", "eval_word", "linear_to_term",
    "enforce_colors", "restrict_term", "restrict_many", "normalize",
    "width", "colors_mentioned", "term_size", "term_depth",
    "make_recolor", "make_join",
]


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, slots=True)
class Empty:
    pass


EMPTY = Empty()


@dataclass(frozen=True, slots=True)
class Const:
    color: int
    vertex: int


@dataclass(frozen=True, slots=True)
class Recolor:
    # sorted (source, target) pairs; colors not listed are fixed
    mapping: tuple[tuple[int, int], ...]
    child: "Term"

    def apply(self, c: int) -> int:
        for s, t in self.mapping:
            if s == c:
                return t
        return c

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)


@dataclass(frozen=True, slots=True)
class Join:
    # canonical pairs (c, d) with c <= d; (c, c) is the singleton {c}
    pairs: frozenset
    children: tuple


Term = Union[Empty, Const, Recolor, Join]


def make_recolor(mapping: Mapping[int, int], child: Term) -> Term:
    """Recolor node with identity entries dropped; collapses onto Empty and nested recolors."""
    if isinstance(child, Empty):
        return EMPTY
    m = {s: t for s, t in mapping.items() if s != t}
    if isinstance(child, Recolor):
        inner = child.as_dict()
        merged = {}
        for s in set(inner) | set(m):
            mid = inner.get(s, s)
            merged[s] = m.get(mid, mid)
        m = {s: t for s, t in merged.items() if s != t}
        child = child.child
    if not m:
        return child
    return Recolor(tuple(sorted(m.items())), child)


def _canon_pairs(pairs: Iterable) -> frozenset:
    out = set()
    for p in pairs:
        p = tuple(p)
        if len(p) == 1:
            p = (p[0], p[0])
        if len(p) != 2:
            raise InputError(f"join pair {p} must have one or two colors")
        c, d = p
        out.add((c, d) if c <= d else (d, c))
    return frozenset(out)


def make_join(pairs: Iterable, children: Iterable[Term]) -> Term:
    """Join node with Empty children dropped; a single survivor is returned bare."""
    kids = tuple(c for c in children if not isinstance(c, Empty))
    if not kids:
        return EMPTY
    if len(kids) == 1:
        return kids[0]
    return Join(_canon_pairs(pairs), kids)


def _children(t: Term) -> tuple:
    if isinstance(t, Recolor):
        return (t.child,)
    if isinstance(t, Join):
        return t.children
    return ()


def postorder(root: Term) -> list[Term]:
    """Nodes children-first; shared subterms appear once."""
    out: list[Term] = []
    seen: set[int] = set()
    stack: list[tuple[Term, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for c in reversed(_children(node)):
            if id(c) not in seen:
                stack.append((c, False))
    return out


def leaves(t: Term) -> list[int]:
    return [n.vertex for n in postorder(t) if isinstance(n, Const)]


def term_size(t: Term) -> int:
    return len(postorder(t))


def term_depth(t: Term) -> int:
    d: dict[int, int] = {}
    for n in postorder(t):
        d[id(n)] = 1 + max((d[id(c)] for c in _children(n)), default=0)
    return d[id(t)]


def colors_mentioned(t: Term) -> frozenset[int]:
    cols: set[int] = set()
    for n in postorder(t):
        if isinstance(n, Const):
            cols.add(n.color)
        elif isinstance(n, Recolor):
            for s, d in n.mapping:
                cols.add(s)
                cols.add(d)
        elif isinstance(n, Join):
            for c, d in n.pairs:
                cols.add(c)
                cols.add(d)
    return frozenset(cols)


def width(t: Term) -> int:
    """Number of distinct colors mentioned anywhere in the term."""
    return len(colors_mentioned(t))


# ---------------------------------------------------------------- evaluation

def _eval_classes(t: Term, adj: dict[int, set[int]]) -> dict[int, list[int]]:
    """Evaluate bottom-up, filling ``adj``; returns the root's color classes."""
    classes: dict[int, dict[int, list[int]]] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            res: dict[int, list[int]] = {}
        elif isinstance(n, Const):
            if n.color < 1:
                raise InputError(f"constant color {n.color} must be positive")
            if n.vertex in adj:
                raise InputError(f"vertex id {n.vertex} used by two leaves")
            adj[n.vertex] = set()
            res = {n.color: [n.vertex]}
        elif isinstance(n, Recolor):
            res = {}
            m = n.as_dict()
            for c, vs in classes[id(n.child)].items():
                res.setdefault(m.get(c, c), []).extend(vs)
        else:
            kids = [classes[id(c)] for c in n.children]
            for c, d in n.pairs:
                per_c = [(i, k.get(c)) for i, k in enumerate(kids) if k.get(c)]
                per_d = [(i, k.get(d)) for i, k in enumerate(kids) if k.get(d)]
                for i, xs in per_c:
                    for j, ys in per_d:
                        if i == j:
                            continue
                        for x in xs:
                            adj[x].update(ys)
                        for y in ys:
                            adj[y].update(xs)
            res = {}
            for k in kids:
                for c, vs in k.items():
                    res.setdefault(c, []).extend(vs)
        classes[id(n)] = res
    return classes[id(t)]


def eval_term(t: Term, k: int | None = None) -> ColoredGraph:
    """Graph denoted by ``t``; ``k`` defaults to the largest color in use."""
    adj: dict[int, set[int]] = {}
    root = _eval_classes(t, adj)
    color = {v: c for c, vs in root.items() for v in vs}
    if k is None:
        k = max(colors_mentioned(t), default=1)
    for c in root:
        if c > k:
            raise InputError(f"result color {c} exceeds k={k}")
    return ColoredGraph._trusted(k, color, {v: frozenset(ns) for v, ns in adj.items()})


# ---------------------------------------------------------------- linear words

@dataclass(frozen=True, slots=True)
class AddVertex:
    color: int
    profile: frozenset
    vertex: int


@dataclass(frozen=True, slots=True)
class RecolorInstr:
    # images of colors 1..k
    images: tuple[int, ...]

    def apply(self, c: int) -> int:
        return self.images[c - 1]


Instruction = Union[AddVertex, RecolorInstr]


@dataclass(frozen=True)
class LinearWord:
    k: int
    instructions: tuple = field(default=())

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"word width k must be >= 1, got {self.k}")
        seen = set()
        for ins in self.instructions:
            if isinstance(ins, AddVertex):
                if not 1 <= ins.color <= self.k:
                    raise InputError(f"AddVertex color {ins.color} outside 1..{self.k}")
                if any(not 1 <= x <= self.k for x in ins.profile):
                    raise InputError(f"profile {sorted(ins.profile)} outside 1..{self.k}")
                if ins.vertex in seen:
                    raise InputError(f"vertex id {ins.vertex} added twice")
                seen.add(ins.vertex)
            elif isinstance(ins, RecolorInstr):
                if len(ins.images) != self.k or any(not 1 <= x <= self.k for x in ins.images):
                    raise InputError(f"recolor images {ins.images} are not a map on 1..{self.k}")
            else:
                raise InputError(f"unknown instruction {ins!r}")

    def __len__(self):
        return len(self.instructions)

    def vertices(self) -> list[int]:
        return [i.vertex for i in self.instructions if isinstance(i, AddVertex)]

    def split(self, at: int) -> tuple[LinearWord, LinearWord]:
        return LinearWord(self.k, self.instructions[:at]), LinearWord(self.k, self.instructions[at:])

    def __add__(self, other: LinearWord) -> LinearWord:
        if other.k != self.k:
            raise InputError("concatenating words of different width")
        return LinearWord(self.k, self.instructions + other.instructions)


def eval_word(w: LinearWord) -> ColoredGraph:
    color: dict[int, int] = {}
    by_color: dict[int, set[int]] = {}
    adj: dict[int, set[int]] = {}
    for ins in w.instructions:
        if isinstance(ins, AddVertex):
            nbrs = set()
            for x in ins.profile:
                nbrs |= by_color.get(x, set())
            adj[ins.vertex] = nbrs
            for u in nbrs:
                adj[u].add(ins.vertex)
            color[ins.vertex] = ins.color
            by_color.setdefault(ins.color, set()).add(ins.vertex)
        else:
            new: dict[int, set[int]] = {}
            for c, vs in by_color.items():
                new.setdefault(ins.apply(c), set()).update(vs)
            by_color = new
    for c, vs in by_color.items():
        for v in vs:
            color[v] = c
    return ColoredGraph._trusted(w.k, color, {v: frozenset(ns) for v, ns in adj.items()})


def linear_to_term(w: LinearWord) -> Term:
    """Embed a word of width k as a term of width at most k+1."""
    fresh = w.k + 1
    t: Term = EMPTY
    for ins in w.instructions:
        if isinstance(ins, RecolorInstr):
            if not isinstance(t, Empty):
                t = make_recolor({i + 1: c for i, c in enumerate(ins.images)}, t)
        elif isinstance(t, Empty):
            t = Const(ins.color, ins.vertex)
        elif not ins.profile:
            t = Join(frozenset(), (t, Const(ins.color, ins.vertex)))
        else:
            pairs = frozenset((x, fresh) for x in ins.profile)
            t = Recolor(((fresh, ins.color),), Join(pairs, (t, Const(fresh, ins.vertex))))
    return t


# ---------------------------------------------------------------- rewrites

def enforce_colors(t: Term, parts: Mapping[int, int], offset: int = 0) -> Term:
    """Rewrite ``t`` so vertex v ends with color ``offset + parts[v]``.

    Every color c of the original is split into (c, class) combinations;
    only the combinations that actually occur below a node get a name, so
    the width is at most width(t) times the number of classes.
    """
    final = _final_colors(t)
    missing = set(final) - set(parts)
    if missing:
        raise InputError(f"partition does not cover leaves {sorted(missing)[:5]}")
    by_color: dict[int, int] = {}
    if all(by_color.setdefault(c, parts[v]) == parts[v] for v, c in final.items()):
        # classes already follow the output colors: one recolor suffices
        return make_recolor({c: offset + q for c, q in by_color.items()}, t)

    code: dict[tuple[int, int], int] = {}

    def name(c: int, q: int) -> int:
        v = code.get((c, q))
        if v is None:
            v = code[(c, q)] = len(code) + 1
        return v

    present: dict[int, dict[int, set[int]]] = {}
    built: dict[int, Term] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            built[id(n)], present[id(n)] = EMPTY, {}
        elif isinstance(n, Const):
            q = parts.get(n.vertex)
            if q is None:
                raise InputError(f"partition does not cover leaf {n.vertex}")
            built[id(n)] = Const(name(n.color, q), n.vertex)
            present[id(n)] = {n.color: {q}}
        elif isinstance(n, Recolor):
            below = present[id(n.child)]
            here: dict[int, set[int]] = {}
            m = {}
            for c, qs in below.items():
                d = n.apply(c)
                here.setdefault(d, set()).update(qs)
                if d != c:
                    for q in qs:
                        m[name(c, q)] = name(d, q)
            built[id(n)] = make_recolor(m, built[id(n.child)])
            present[id(n)] = here
        else:
            kids = [present[id(c)] for c in n.children]
            here = {}
            for k in kids:
                for c, qs in k.items():
                    here.setdefault(c, set()).update(qs)
            pairs = set()
            for c, d in n.pairs:
                for q in here.get(c, ()):
                    for r in here.get(d, ()):
                        pairs.add((name(c, q), name(d, r)))
            built[id(n)] = make_join(pairs, [built[id(c)] for c in n.children])
            present[id(n)] = here
    top = present[id(t)]
    final = {name(c, q): offset + q for c, qs in top.items() for q in qs}
    return make_recolor(final, built[id(t)])


def _final_colors(t: Term) -> dict[int, int]:
    classes: dict[int, dict[int, list[int]]] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            res: dict[int, list[int]] = {}
        elif isinstance(n, Const):
            res = {n.color: [n.vertex]}
        elif isinstance(n, Recolor):
            res = {}
            m = n.as_dict()
            for c, vs in classes[id(n.child)].items():
                res.setdefault(m.get(c, c), []).extend(vs)
        else:
            res = {}
            for ch in n.children:
                for c, vs in classes[id(ch)].items():
                    res.setdefault(c, []).extend(vs)
        classes[id(n)] = res
    return {v: c for c, vs in classes[id(t)].items() for v in vs}


def restrict_many(t: Term, classes: Mapping[int, object]) -> dict[object, Term]:
    """Restrict ``t`` to each class of a (partial) leaf labelling in one pass.

    Leaves without a label are dropped.  Returns label -> restricted term.
    """
    parts: dict[int, dict[object, Term]] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            res: dict[object, Term] = {}
        elif isinstance(n, Const):
            lab = classes.get(n.vertex, _MISSING)
            res = {} if lab is _MISSING else {lab: n}
        elif isinstance(n, Recolor):
            m = n.as_dict()
            res = {lab: make_recolor(m, s) for lab, s in parts[id(n.child)].items()}
        else:
            grouped: dict[object, list[Term]] = {}
            for c in n.children:
                for lab, s in parts[id(c)].items():
                    grouped.setdefault(lab, []).append(s)
            res = {}
            for lab, subs in grouped.items():
                if len(subs) == 1:
                    res[lab] = subs[0]
                elif len(subs) == len(n.children) and all(a is b for a, b in zip(subs, n.children)):
                    res[lab] = n
                else:
                    res[lab] = Join(n.pairs, tuple(subs))
        parts[id(n)] = res
    return parts[id(t)]


_MISSING = object()


def restrict_term(t: Term, keep: Iterable[int]) -> Term:
    keep = frozenset(keep)
    present = set(leaves(t))
    if not keep <= present:
        raise InputError(f"restriction set mentions non-leaves {sorted(keep - present)[:5]}")
    return restrict_many(t, {v: 0 for v in keep}).get(0, EMPTY)


def normalize(t: Term, fixed: Sequence[int] = ()) -> Term:
    """Rename colors onto 1..w, keeping colors in ``fixed`` (in order) first."""
    order = list(dict.fromkeys(fixed))
    rest = sorted(colors_mentioned(t) - set(order))
    ren = {c: i + 1 for i, c in enumerate(order + rest)}
    return _rename(t, ren)


def _rename(t: Term, ren: Mapping[int, int]) -> Term:
    built: dict[int, Term] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            b: Term = EMPTY
        elif isinstance(n, Const):
            b = Const(ren.get(n.color, n.color), n.vertex)
        elif isinstance(n, Recolor):
            b = Recolor(tuple(sorted((ren.get(s, s), ren.get(d, d)) for s, d in n.mapping)), built[id(n.child)])
        else:
            b = Join(_canon_pairs((ren.get(c, c), ren.get(d, d)) for c, d in n.pairs),
                     tuple(built[id(c)] for c in n.children))
        built[id(n)] = b
    return built[id(t)]


def all_pairs(colors: Iterable[int]) -> frozenset:
    """Every singleton and two-element subset over ``colors``."""
    return frozenset(combinations_with_replacement(sorted(colors), 2))
