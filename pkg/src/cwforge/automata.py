"""Bottom-up automata over clique terms.

A join combines its children with a binary step that must be commutative and
associative, so a run never depends on child order.

Connectivity state: a sorted tuple of ``(signature, count)`` where a
signature is the bitmask of colors present in one connected component and the
count is capped at 2.  The cap is sound because join edges depend only on
colors: when a signature class touches anything during a join, every member
of the class merges into one component, so 2 and 3 copies behave the same.
A class that touches nothing keeps its count, and acceptance only asks
whether a single component with count 1 remains.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable

from .errors import InputError
from .graphs import ColoredGraph, connected_components
from .terms import Const, Empty, Join, Recolor, Term, postorder

__all__ = ["TermAutomaton", "RunResult", "run", "automaton_mod_p", "automaton_connectivity", "parse_automaton"]

State = Hashable


@dataclass(frozen=True)
class TermAutomaton:
    name: str
    k: int | None                                        # highest allowed color; None for any
    constant: Callable[[int], State]
    recolor: Callable[[dict[int, int], State], State]
    unit: State                                          # join identity and state of the empty term
    combine: Callable[[frozenset, State, State], State]  # commutative, associative in the last two
    accept: Callable[[State], bool]
    reference: Callable[[ColoredGraph], bool] | None = None  # the property, computed directly
    finalize: Callable[[frozenset, State], State] = lambda S, q: q


@dataclass(frozen=True)
class RunResult:
    state: Any
    accepted: bool


def _check_color(a: TermAutomaton, c: int) -> None:
    if c < 1 or (a.k is not None and c > a.k):
        raise InputError(f"color {c} outside 1..{a.k} for automaton {a.name}")


def run(a: TermAutomaton, t: Term) -> RunResult:
    state: dict[int, State] = {}
    for node in postorder(t):
        if isinstance(node, Empty):
            q = a.unit
        elif isinstance(node, Const):
            _check_color(a, node.color)
            q = a.constant(node.color)
        elif isinstance(node, Recolor):
            m = node.as_dict()
            for x, y in m.items():
                _check_color(a, x)
                _check_color(a, y)
            q = a.recolor(m, state[id(node.child)])
        elif isinstance(node, Join):
            for c, d in node.pairs:
                _check_color(a, c)
                _check_color(a, d)
            q = a.unit
            for ch in node.children:
                q = a.combine(node.pairs, q, state[id(ch)])
            q = a.finalize(node.pairs, q)
        else:
            raise InputError(f"not a term node: {node!r}")
        state[id(node)] = q
    q = state[id(t)]
    return RunResult(q, bool(a.accept(q)))


def automaton_mod_p(p: int) -> TermAutomaton:
    """Accepts exactly the terms whose vertex count is divisible by p."""
    if p < 1:
        raise InputError("p must be at least 1")
    return TermAutomaton(
        name=f"modp:{p}", k=None,
        constant=lambda c: 1 % p,
        recolor=lambda m, q: q,
        unit=0,
        combine=lambda S, x, y: (x + y) % p,
        accept=lambda q: q == 0,
        reference=lambda g: len(g) % p == 0,
    )


def _cap_add(acc: dict[int, int], sig: int, cnt: int) -> None:
    acc[sig] = min(2, acc.get(sig, 0) + cnt)


def _canon(acc: dict[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(acc.items()))


def _masks_for(S: frozenset) -> dict[int, int]:
    """color -> bitmask of colors it is joined with under S."""
    out: dict[int, int] = {}
    for c, d in S:
        out[c] = out.get(c, 0) | 1 << (d - 1)
        out[d] = out.get(d, 0) | 1 << (c - 1)
    return out


def _joined(sig_a: int, sig_b: int, partners: dict[int, int]) -> bool:
    m = sig_a
    while m:
        low = m & -m
        if partners.get(low.bit_length(), 0) & sig_b:
            return True
        m ^= low
    return False


def _conn_combine(S: frozenset, x, y):
    if not x:
        return y
    if not y:
        return x
    partners = _masks_for(S)
    entries = [(sig, cnt) for sig, cnt in x] + [(sig, cnt) for sig, cnt in y]
    nx = len(x)
    parent = list(range(len(entries)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(nx):
        for j in range(nx, len(entries)):
            if _joined(entries[i][0], entries[j][0], partners):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(entries)):
        groups.setdefault(find(i), []).append(i)
    acc: dict[int, int] = {}
    for members in groups.values():
        if len(members) == 1:
            sig, cnt = entries[members[0]]
            _cap_add(acc, sig, cnt)
        else:
            sig = 0
            for i in members:
                sig |= entries[i][0]
            _cap_add(acc, sig, 1)
    return _canon(acc)


def _conn_recolor(m: dict[int, int], q):
    acc: dict[int, int] = {}
    for sig, cnt in q:
        out = 0
        s = sig
        while s:
            low = s & -s
            c = low.bit_length()
            out |= 1 << (m.get(c, c) - 1)
            s ^= low
        _cap_add(acc, out, cnt)
    return _canon(acc)


def _is_connected(g: ColoredGraph) -> bool:
    return len(g) > 0 and len(connected_components(g)) == 1


def automaton_connectivity(k: int) -> TermAutomaton:
    """Accepts exactly the terms whose graph is nonempty and connected."""
    if k < 1:
        raise InputError("k must be at least 1")
    return TermAutomaton(
        name="connected", k=k,
        constant=lambda c: ((1 << (c - 1), 1),),
        recolor=_conn_recolor,
        unit=(),
        combine=_conn_combine,
        accept=lambda q: len(q) == 1 and q[0][1] == 1,
        reference=_is_connected,
    )


def parse_automaton(spec: str, k: int) -> TermAutomaton:
    """``modp:<p>`` or ``connected``."""
    if spec == "connected":
        return automaton_connectivity(k)
    if spec.startswith("modp:"):
        try:
            p = int(spec[5:])
        except ValueError:
            raise InputError(f"bad modulus in {spec!r}") from None
        return automaton_mod_p(p)
    raise InputError(f"unknown automaton {spec!r} (expected modp:<p> or connected)")
