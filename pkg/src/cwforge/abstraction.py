"""Abstractions of derivations.

The full abstraction keeps the nonempty cells, a connectivity registry over
a chosen family of flips, and the recoloring.  The reduced abstraction drops
the registry; it composes by a closed formula and is what the factorization
runs on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterable, NamedTuple

from .derivations import (Cell, Derivation, Phi, all_cells, cell_index,
                          compose_phi, identity_phi, preimage, zflip)
from .graphs import connected_components

__all__ = [
    "Abstraction", "Reduced", "abstract", "reduced", "reduced_compose", "is_idempotent",
    "phi_is_idempotent", "pair_type", "positive_Z", "all_zs", "default_zfamily",
    "NEGATIVE", "POSITIVE", "MIXED",
]

NEGATIVE, POSITIVE, MIXED = "negative", "positive", "mixed"

ZSet = frozenset  # of canonical cell pairs


def pair_type(c: Cell, d: Cell, phi: Phi) -> str:
    (i, X), (j, Y) = c, d
    a = X >> (phi[j - 1] - 1) & 1
    b = Y >> (phi[i - 1] - 1) & 1
    if a and b:
        return POSITIVE
    if not a and not b:
        return NEGATIVE
    return MIXED


def positive_Z(L: Iterable[Cell], phi: Phi) -> ZSet:
    cells = sorted(set(L))
    return frozenset((c, d) for c, d in combinations_with_replacement(cells, 2)
                     if pair_type(c, d, phi) == POSITIVE)


def all_zs(k: int) -> list[ZSet]:
    """Every family of cell pairs; only sensible for k = 1."""
    pairs = list(combinations_with_replacement(all_cells(k), 2))
    return [frozenset(p for b, p in enumerate(pairs) if mask >> b & 1) for mask in range(1 << len(pairs))]


def default_zfamily(s: Derivation, extra: Iterable[ZSet] = ()) -> frozenset[ZSet]:
    if s.k == 1:
        return frozenset(all_zs(1)) | frozenset(extra)
    return frozenset([positive_Z(s.nonempty_cells(), s.phi)]) | frozenset(extra)


@dataclass(frozen=True)
class Abstraction:
    L: frozenset
    rho: frozenset  # tuples (Z, c, d, W)
    phi: Phi
    zfamily: frozenset

    def reduced(self) -> "Reduced":
        return Reduced.of(self.L, self.phi)


def _registry(s: Derivation, Z: ZSet, L: list[Cell]) -> set:
    H = zflip(s, Z)
    cells = s.cells()
    out = set()
    for r in range(len(L) + 1):
        for W in combinations(L, r):
            inner = frozenset().union(*(cells[b] for b in W)) if W else frozenset()
            comp_of: dict[int, int] = {}
            for idx, comp in enumerate(connected_components(H, inner)):
                for v in comp:
                    comp_of[v] = idx
            # components each vertex touches (as member or neighbor)
            touch: dict[int, set[int]] = {}
            for v in H.vertex_set():
                t = {comp_of[u] for u in H.neighbors(v) if u in comp_of}
                if v in comp_of:
                    t.add(comp_of[v])
                touch[v] = t
            Wf = frozenset(W)
            for c in L:
                out.add((Z, c, c, Wf))
            for c, d in combinations(L, 2):
                ok = False
                for u in cells[c]:
                    nu = H.neighbors(u)
                    for v in cells[d]:
                        if v in nu or touch[u] & touch[v]:
                            ok = True
                            break
                    if ok:
                        break
                if ok:
                    out.add((Z, c, d, Wf))
                    out.add((Z, d, c, Wf))
    return out


def abstract(s: Derivation, zfamily: Iterable[ZSet] | None = None) -> Abstraction:
    """Full abstraction; W ranges over subsets of the nonempty cells."""
    zfamily = default_zfamily(s) if zfamily is None else frozenset(zfamily)
    L = sorted(s.nonempty_cells())
    rho: set = set()
    for Z in zfamily:
        rho |= _registry(s, Z, L)
    return Abstraction(frozenset(L), frozenset(rho), s.phi, zfamily)


# ---------------------------------------------------------------- reduced

class Reduced(NamedTuple):
    """(L, phi) with L encoded as a bitmask over canonical cell indices."""
    L: int
    phi: Phi

    @property
    def k(self) -> int:
        return len(self.phi)

    @classmethod
    def of(cls, cells: Iterable[Cell], phi: Phi) -> "Reduced":
        k = len(phi)
        m = 0
        for c in cells:
            m |= 1 << cell_index(c, k)
        return cls(m, tuple(phi))

    def cells(self) -> frozenset[Cell]:
        k = self.k
        w = 1 << k
        return frozenset(((i // w) + 1, i % w) for i in range(self.L.bit_length()) if self.L >> i & 1)

    def __str__(self) -> str:
        cs = " ".join(f"({c},{m})" for c, m in sorted(self.cells()))
        return f"L=[{cs}] phi={list(self.phi)}"


def reduced(x: Derivation | Abstraction) -> Reduced:
    if isinstance(x, Abstraction):
        return x.reduced()
    return Reduced.of(x.nonempty_cells(), x.phi)


@lru_cache(maxsize=None)
def _color_map_table(phi: Phi) -> tuple[int, ...]:
    # cell index -> cell index of (phi(i), X)
    k = len(phi)
    w = 1 << k
    return tuple((phi[i // w] - 1) * w + i % w for i in range(k * w))


@lru_cache(maxsize=None)
def _profile_map_table(phi: Phi) -> tuple[int, ...]:
    # cell index -> cell index of (j, phi^{-1}(Y))
    k = len(phi)
    w = 1 << k
    return tuple((i // w) * w + preimage(phi, i % w) for i in range(k * w))


def _map_mask(mask: int, table: tuple[int, ...]) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << table[low.bit_length() - 1]
        mask ^= low
    return out


@lru_cache(maxsize=1 << 20)
def reduced_compose(e1: Reduced, e2: Reduced) -> Reduced:
    L = _map_mask(e1.L, _color_map_table(e2.phi)) | _map_mask(e2.L, _profile_map_table(e1.phi))
    return Reduced(L, compose_phi(e2.phi, e1.phi))


def is_idempotent(e: Reduced) -> bool:
    return reduced_compose(e, e) == e


def phi_is_idempotent(phi: Phi) -> bool:
    return all(phi[c - 1] == c for c in set(phi))


def reduced_identity(k: int) -> Reduced:
    return Reduced(0, identity_phi(k))
