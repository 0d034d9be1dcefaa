"""k-derivations: colored graphs with per-vertex profiles and a recoloring.

Profiles are stored as bitmasks (bit ``i-1`` stands for color ``i``) and the
recoloring as a tuple of images of ``1..k``.  Cells are ``(color, mask)``
pairs; their canonical order is color-major, then mask.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .graphs import ColoredGraph, _flip_many
from .terms import AddVertex, LinearWord

Cell = tuple[int, int]
Phi = tuple[int, ...]

__all__ = [
    "Cell", "Derivation", "BlockProduct", "identity_phi", "compose_phi", "preimage",
    "mask_of", "set_of", "cell_index", "all_cells", "atomic", "from_word", "compose",
    "product", "zflip", "restrict_derivation", "block_product", "canon_cell_pair",
]


def identity_phi(k: int) -> Phi:
    return tuple(range(1, k + 1))


def compose_phi(outer: Phi, inner: Phi) -> Phi:
    """outer after inner."""
    return tuple(outer[c - 1] for c in inner)


@lru_cache(maxsize=None)
def _preimage_table(phi: Phi) -> tuple[int, ...]:
    k = len(phi)
    table = []
    for mask in range(1 << k):
        table.append(sum(1 << (i - 1) for i in range(1, k + 1) if mask >> (phi[i - 1] - 1) & 1))
    return tuple(table)


def preimage(phi: Phi, mask: int) -> int:
    """Mask of colors i with phi(i) in ``mask``."""
    return _preimage_table(phi)[mask]


def mask_of(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        m |= 1 << (c - 1)
    return m


def set_of(mask: int) -> frozenset[int]:
    return frozenset(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def cell_index(cell: Cell, k: int) -> int:
    """0-based position of a cell in the canonical order."""
    return (cell[0] - 1) * (1 << k) + cell[1]


def all_cells(k: int) -> list[Cell]:
    return [(c, m) for c in range(1, k + 1) for m in range(1 << k)]


def canon_cell_pair(c: Cell, d: Cell) -> tuple[Cell, Cell]:
    return (c, d) if c <= d else (d, c)


@dataclass(frozen=True, eq=False)
class Derivation:
    G: ColoredGraph
    lam: Mapping[int, int]
    phi: Phi

    def __post_init__(self):
        k = self.G.k
        if len(self.phi) != k or any(not 1 <= x <= k for x in self.phi):
            raise InputError(f"recoloring {self.phi} is not a map on 1..{k}")
        if self.lam.keys() != self.G.vertex_set():
            raise InputError("profiles must be given for exactly the graph's vertices")
        top = 1 << k
        for v, m in self.lam.items():
            if not 0 <= m < top:
                raise InputError(f"profile mask {m} of vertex {v} exceeds k={k}")

    @property
    def k(self) -> int:
        return self.G.k

    def cell(self, v: int) -> Cell:
        return (self.G.color(v), self.lam[v])

    def cells(self) -> dict[Cell, frozenset[int]]:
        out: dict[Cell, set[int]] = {}
        for v in self.G.vertex_set():
            out.setdefault(self.cell(v), set()).add(v)
        return {c: frozenset(vs) for c, vs in out.items()}

    def nonempty_cells(self) -> frozenset[Cell]:
        return frozenset(self.cell(v) for v in self.G.vertex_set())

    def profile(self, v: int) -> frozenset[int]:
        return set_of(self.lam[v])

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.phi == other.phi and self.G == other.G and dict(self.lam) == dict(other.lam)

    def __hash__(self):
        return hash((self.phi, self.G))

    def __repr__(self):
        return f"Derivation(k={self.k}, n={len(self.G)}, phi={self.phi})"


def atomic(k: int, phi: Sequence[int] | None = None, color: int | None = None,
           profile: Iterable[int] = (), vertex: int | None = None) -> Derivation:
    """Zero-vertex derivation ``(phi)`` or one-vertex derivation with identity-or-given phi."""
    phi = identity_phi(k) if phi is None else tuple(phi)
    if color is None:
        return Derivation(ColoredGraph.empty(k), {}, phi)
    if vertex is None:
        raise InputError("a one-vertex atomic needs a vertex id")
    return Derivation(ColoredGraph(k, {vertex: color}), {vertex: mask_of(profile)}, phi)


def _atomic_of(k: int, ins) -> Derivation:
    if isinstance(ins, AddVertex):
        return atomic(k, color=ins.color, profile=ins.profile, vertex=ins.vertex)
    return atomic(k, phi=ins.images)


def compose(s1: Derivation, s2: Derivation) -> Derivation:
    k = s1.k
    if s2.k != k:
        raise InputError(f"composing derivations of width {k} and {s2.k}")
    g1, g2 = s1.G, s2.G
    if g1._color.keys() & g2._color.keys():
        raise InputError("composed derivations share vertex ids")
    color = {v: s2.phi[c - 1] for v, c in g1._color.items()}
    color.update(g2._color)
    lam = dict(s1.lam)
    pre = _preimage_table(s1.phi)
    for v, m in s2.lam.items():
        lam[v] = pre[m]
    by_color: dict[int, list[int]] = {}
    for v, c in g1._color.items():
        by_color.setdefault(c, []).append(v)
    adj = {v: set(ns) for v, ns in g1._adj.items()}
    adj.update((v, set(ns)) for v, ns in g2._adj.items())
    for v, m in s2.lam.items():
        for c, us in by_color.items():
            if m >> (c - 1) & 1:
                adj[v].update(us)
                for u in us:
                    adj[u].add(v)
    G = ColoredGraph._trusted(k, color, {v: frozenset(ns) for v, ns in adj.items()})
    return Derivation(G, lam, compose_phi(s2.phi, s1.phi))


def product(factors: Sequence[Derivation]) -> Derivation:
    """Left-to-right product in one pass (avoids re-copying graphs per step)."""
    if not factors:
        raise InputError("empty product: the derivation semigroup has no unit")
    if len(factors) == 1:
        return factors[0]
    k = factors[0].k
    # suffix recolorings: colors of block s are mapped by phi_n o ... o phi_{s+1}
    n = len(factors)
    suffix: list[Phi] = [identity_phi(k)] * n
    for s in range(n - 2, -1, -1):
        suffix[s] = compose_phi(suffix[s + 1], factors[s + 1].phi)
    color: dict[int, int] = {}
    lam: dict[int, int] = {}
    adj: dict[int, set[int]] = {}
    by_color: dict[int, list[int]] = {}  # colors as seen by the next block
    prefix = identity_phi(k)
    for s, f in enumerate(factors):
        if f.k != k:
            raise InputError("factors of different width")
        pre = _preimage_table(prefix)
        for v, c in f.G._color.items():
            if v in color:
                raise InputError(f"vertex id {v} appears in two factors")
            color[v] = suffix[s][c - 1]
            lam[v] = pre[f.lam[v]]
            adj[v] = set(f.G._adj[v])
        for v, m in f.lam.items():
            for c, us in by_color.items():
                if m >> (c - 1) & 1:
                    adj[v].update(us)
                    for u in us:
                        adj[u].add(v)
        nxt: dict[int, list[int]] = {}
        for c, us in by_color.items():
            nxt.setdefault(f.phi[c - 1], []).extend(us)
        for v, c in f.G._color.items():
            nxt.setdefault(c, []).append(v)
        by_color = nxt
        prefix = compose_phi(f.phi, prefix)
    G = ColoredGraph._trusted(k, color, {v: frozenset(ns) for v, ns in adj.items()})
    return Derivation(G, lam, prefix)


def from_word(w: LinearWord) -> Derivation:
    """Product of the atomic derivations of the instructions."""
    if not w.instructions:
        raise InputError("empty word has no derivation (no unit element)")
    return product([_atomic_of(w.k, ins) for ins in w.instructions])


def zflip(s: Derivation, Z: Iterable[tuple[Cell, Cell]]) -> ColoredGraph:
    cells = s.cells()
    empty: frozenset[int] = frozenset()
    pairs = [(cells.get(c, empty), cells.get(d, empty)) for c, d in Z]
    return _flip_many(s.G, [(X, Y) for X, Y in pairs if X and Y])


def restrict_derivation(s: Derivation, keep: Iterable[int]) -> Derivation:
    keep = frozenset(keep)
    G = s.G.induced(keep)
    return Derivation(G, {v: s.lam[v] for v in keep}, s.phi)


@dataclass(frozen=True, eq=False)
class BlockProduct:
    factors: tuple[Derivation, ...]
    composed: Derivation
    block_of: Mapping[int, int]
    U: Mapping[Cell, frozenset[int]]

    def modulus(self, v: int) -> int:
        return self.block_of[v] % 7

    @property
    def n(self) -> int:
        return len(self.factors)

    def factor_cell(self, v: int) -> Cell:
        """Cell of v inside its own block's factor."""
        f = self.factors[self.block_of[v] - 1]
        return f.cell(v)


def block_product(factors: Sequence[Derivation]) -> BlockProduct:
    factors = tuple(factors)
    composed = product(factors)
    block_of: dict[int, int] = {}
    U: dict[Cell, set[int]] = {}
    for s, f in enumerate(factors, start=1):
        for v in f.G.vertex_set():
            block_of[v] = s
            U.setdefault(f.cell(v), set()).add(v)
    return BlockProduct(factors, composed, block_of, {c: frozenset(vs) for c, vs in U.items()})
