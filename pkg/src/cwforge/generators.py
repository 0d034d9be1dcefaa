"""Seeded random words, terms and derivations.

All randomness comes from numpy's counter-based Philox generator keyed by the
seed; independent streams are derived with ``spawn`` so adding a consumer
never perturbs another.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivations import Derivation, mask_of
from .errors import InputError
from .graphs import ColoredGraph
from .terms import EMPTY, AddVertex, Const, LinearWord, RecolorInstr, Term, make_join, make_recolor

__all__ = ["GenSpec", "rng_for", "gen_word", "gen_term", "gen_derivation"]


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Generator for ``seed`` and an optional stream path (e.g. case index)."""
    ss = np.random.SeedSequence(seed & ((1 << 64) - 1), spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GenSpec:
    k: int
    length: int
    seed: int = 0
    add_weight: float = 0.8
    recolor_weight: float = 0.2
    density: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be positive")
        if self.length < 1:
            raise InputError("length must be positive")
        if self.add_weight < 0 or self.recolor_weight < 0 or self.add_weight + self.recolor_weight == 0:
            raise InputError("instruction weights must be nonnegative and not both zero")
        if not 0.0 <= self.density <= 1.0:
            raise InputError("profile density must lie in [0, 1]")


def gen_word(spec: GenSpec, rng: np.random.Generator | None = None, first_id: int = 1) -> LinearWord:
    """Random word; the first instruction is an AddVertex whenever that has positive weight."""
    rng = rng_for(spec.seed) if rng is None else rng
    k = spec.k
    p_rec = spec.recolor_weight / (spec.add_weight + spec.recolor_weight)
    out = []
    vid = first_id
    for i in range(spec.length):
        is_rec = rng.random() < p_rec
        if i == 0 and spec.add_weight > 0:
            is_rec = False
        if is_rec:
            out.append(RecolorInstr(tuple(int(x) for x in rng.integers(1, k + 1, size=k))))
        else:
            color = int(rng.integers(1, k + 1))
            prof = frozenset(int(c) for c in np.flatnonzero(rng.random(k) < spec.density) + 1)
            out.append(AddVertex(color, prof, vid))
            vid += 1
    return LinearWord(k, tuple(out))


def gen_term(rng: np.random.Generator, k: int, leaves: int, first_id: int = 1) -> Term:
    """Random term with ``leaves`` constants over colors 1..k."""
    if leaves == 0:
        return EMPTY
    pool: list[Term] = [Const(int(rng.integers(1, k + 1)), first_id + i) for i in range(leaves)]
    while len(pool) > 1 or rng.random() < 0.3:
        if len(pool) > 1 and rng.random() < 0.7:
            r = int(rng.integers(2, min(4, len(pool)) + 1))
            pick = rng.permutation(len(pool))[:r]
            kids = [pool[i] for i in sorted(pick)]
            pool = [p for i, p in enumerate(pool) if i not in set(pick.tolist())]
            pairs = set()
            for _ in range(int(rng.integers(0, k + 1))):
                a, b = sorted(int(x) for x in rng.integers(1, k + 1, size=2))
                pairs.add((a, b))
            pool.append(make_join(pairs, kids))
        else:
            i = int(rng.integers(len(pool)))
            m = {c: int(rng.integers(1, k + 1)) for c in range(1, k + 1)}
            pool[i] = make_recolor(m, pool[i])
            if len(pool) == 1:
                break
    return pool[0]


def gen_derivation(rng: np.random.Generator, k: int, max_vertices: int, first_id: int = 1,
                   min_vertices: int = 0) -> Derivation:
    n = int(rng.integers(min_vertices, max_vertices + 1))
    ids = list(range(first_id, first_id + n))
    colors = {v: int(rng.integers(1, k + 1)) for v in ids}
    edges = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:] if rng.random() < 0.5]
    lam = {v: mask_of(int(c) for c in np.flatnonzero(rng.random(k) < 0.5) + 1) for v in ids}
    phi = tuple(int(x) for x in rng.integers(1, k + 1, size=k))
    return Derivation(ColoredGraph(k, colors, edges), lam, phi)
