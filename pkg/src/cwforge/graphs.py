"""Colored simple graphs and the handful of graph operations everything else uses.

Vertex ids are opaque integers that survive every transformation, so two
graphs built along different routes compare by identity, never by
isomorphism search.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Iterator, Mapping

from .errors import InputError

__all__ = [
    "ColoredGraph",
    "flip",
    "connected_components",
    "partition_rank",
    "is_isomorphic",
]


class ColoredGraph:
    """Finite simple graph with a color in ``1..k`` on every vertex.

    Instances are treated as immutable; all "modifying" methods return a
    new graph.
    """

    __slots__ = ("k", "_color", "_adj")

    def __init__(self, k: int, colors: Mapping[int, int], edges: Iterable[tuple[int, int]] = ()):
        if k < 1:
            raise InputError(f"color budget k must be >= 1, got {k}")
        color = dict(colors)
        for v, c in color.items():
            if not 1 <= c <= k:
                raise InputError(f"vertex {v} has color {c} outside 1..{k}")
        adj: dict[int, set[int]] = {v: set() for v in color}
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop on vertex {u}")
            if u not in adj or v not in adj:
                raise InputError(f"edge {u}-{v} mentions an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        self.k = k
        self._color = color
        self._adj = {v: frozenset(n) for v, n in adj.items()}

    @classmethod
    def _trusted(cls, k: int, color: dict[int, int], adj: dict[int, frozenset[int]]) -> ColoredGraph:
        # caller guarantees a symmetric, loop-free adjacency over the keys of ``color``
        g = object.__new__(cls)
        g.k = k
        g._color = color
        g._adj = adj
        return g

    @classmethod
    def empty(cls, k: int) -> ColoredGraph:
        return cls._trusted(k, {}, {})

    # -- inspection -------------------------------------------------------
    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._color))

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self._color)

    def __len__(self) -> int:
        return len(self._color)

    def __contains__(self, v) -> bool:
        return v in self._color

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._color))

    def color(self, v: int) -> int:
        return self._color[v]

    @property
    def colors(self) -> Mapping[int, int]:
        return dict(self._color)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, ns in self._adj.items() for v in ns if u < v)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u, ns in self._adj.items() for v in ns if u < v)

    def num_edges(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2

    def color_classes(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for v, c in self._color.items():
            out.setdefault(c, set()).add(v)
        return {c: frozenset(vs) for c, vs in out.items()}

    def used_colors(self) -> frozenset[int]:
        return frozenset(self._color.values())

    # -- derived graphs ---------------------------------------------------
    def induced(self, keep: Iterable[int]) -> ColoredGraph:
        keep = frozenset(keep)
        unknown = keep - self._color.keys()
        if unknown:
            raise InputError(f"unknown vertex ids {sorted(unknown)[:5]}")
        color = {v: self._color[v] for v in keep}
        adj = {v: self._adj[v] & keep for v in keep}
        return ColoredGraph._trusted(self.k, color, adj)

    def recolored(self, mapping: Callable[[int], int] | Mapping[int, int], k: int | None = None) -> ColoredGraph:
        k = self.k if k is None else k
        f = mapping if callable(mapping) else (lambda c, m=mapping: m.get(c, c))
        color = {v: f(c) for v, c in self._color.items()}
        for v, c in color.items():
            if not 1 <= c <= k:
                raise InputError(f"recoloring sends vertex {v} to color {c} outside 1..{k}")
        return ColoredGraph._trusted(k, color, self._adj)

    def with_colors(self, color: Mapping[int, int], k: int | None = None) -> ColoredGraph:
        return ColoredGraph(self.k if k is None else k, color, self.edges)

    def relabeled(self, mapping: Callable[[int], int] | Mapping[int, int]) -> ColoredGraph:
        f = mapping if callable(mapping) else mapping.__getitem__
        color = {f(v): c for v, c in self._color.items()}
        if len(color) != len(self._color):
            raise InputError("relabeling is not injective")
        adj = {f(v): frozenset(f(u) for u in ns) for v, ns in self._adj.items()}
        return ColoredGraph._trusted(self.k, color, adj)

    def uncolored_equal(self, other: ColoredGraph) -> bool:
        """Same vertex ids and same edges; colors and ``k`` ignored."""
        return self._color.keys() == other._color.keys() and self._adj == other._adj

    # -- dunder -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return self.k == other.k and self._color == other._color and self._adj == other._adj

    def __hash__(self):
        return hash((self.k, frozenset(self._color.items()), self.edge_set()))

    def __repr__(self) -> str:
        return f"ColoredGraph(k={self.k}, n={len(self)}, m={self.num_edges()})"


def _check_subset(G: ColoredGraph, X: Iterable[int], what: str) -> frozenset[int]:
    X = frozenset(X)
    unknown = X - G._color.keys()
    if unknown:
        raise InputError(f"{what} contains unknown vertex ids {sorted(unknown)[:5]}")
    return X


def flip(G: ColoredGraph, X: Iterable[int], Y: Iterable[int]) -> ColoredGraph:
    """Toggle adjacency of every unordered pair {x, y} with x in X, y in Y, x != y."""
    X = _check_subset(G, X, "X")
    Y = _check_subset(G, Y, "Y")
    return _flip_many(G, [(X, Y)])


def _flip_many(G: ColoredGraph, pairs: Iterable[tuple[frozenset[int], frozenset[int]]]) -> ColoredGraph:
    adj = {v: set(ns) for v, ns in G._adj.items()}
    for X, Y in pairs:
        both = X & Y
        for x in X:
            x_in_both = x in both
            for y in Y:
                if y == x or (x_in_both and y in both and y < x):
                    continue
                if y in adj[x]:
                    adj[x].discard(y)
                    adj[y].discard(x)
                else:
                    adj[x].add(y)
                    adj[y].add(x)
    return ColoredGraph._trusted(G.k, G._color, {v: frozenset(ns) for v, ns in adj.items()})


def connected_components(G: ColoredGraph, within: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Connectivity classes, each sorted, ordered by smallest member.

    With ``within``, components of the induced subgraph on that set.
    """
    allowed = G._color.keys() if within is None else frozenset(within)
    seen: set[int] = set()
    out = []
    for s in sorted(allowed):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in G._adj[u]:
                if w not in seen and w in allowed:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        out.append(tuple(sorted(comp)))
    return out


def partition_rank(G: ColoredGraph, V0: Iterable[int]) -> int:
    """Number of classes of "same side, same neighborhood across the cut"."""
    V0 = _check_subset(G, V0, "V0")
    V1 = G._color.keys() - V0
    keys = set()
    for v in G._color:
        if v in V0:
            keys.add((0, G._adj[v] & V1))
        else:
            keys.add((1, G._adj[v] & V0))
    return len(keys)


def is_isomorphic(G1: ColoredGraph, G2: ColoredGraph, respect_colors: bool = False, max_vertices: int = 16) -> bool:
    """Backtracking isomorphism test for small graphs.

    Candidates are pruned by degree (and color when ``respect_colors``) and
    by adjacency consistency with the partial map; intended for graphs of a
    dozen vertices or so.
    """
    if len(G1) != len(G2) or G1.num_edges() != G2.num_edges():
        return False
    if len(G1) > max_vertices:
        raise InputError(f"isomorphism test limited to {max_vertices} vertices")

    def signature(G, v):
        base = (len(G._adj[v]), tuple(sorted(len(G._adj[u]) for u in G._adj[v])))
        return base + ((G._color[v],) if respect_colors else ())

    sig1 = {v: signature(G1, v) for v in G1._color}
    sig2 = {v: signature(G2, v) for v in G2._color}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return False
    order = sorted(G1._color, key=lambda v: (-len(G1._adj[v]), v))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in G2._color:
            if w in used or sig2[w] != sig1[v]:
                continue
            if all((u in G1._adj[v]) == (mapping[u] in G2._adj[w]) for u in mapping):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return extend(0)
