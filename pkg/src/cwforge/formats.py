"""Text formats and their parsers.

Every ``dump_*`` output re-parses with the matching ``parse_*`` to an equal
value.  Parsers raise InputError carrying the offending line number.
"""
from __future__ import annotations

import re
from typing import Iterator

from .abstraction import Abstraction
from .derivations import Derivation, mask_of, set_of
from .errors import InputError
from .graphs import ColoredGraph
from .terms import (EMPTY, AddVertex, Const, Empty, Join, LinearWord, Recolor, RecolorInstr, Term,
                    colors_mentioned, postorder)

__all__ = [
    "dump_graph", "parse_graph", "dump_term", "parse_term", "dump_word", "parse_word",
    "dump_derivation", "parse_derivation", "dump_abstraction", "parse_abstraction",
    "sniff",
]


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"{what} must be an integer, got {tok!r}", no) from None


def _header(tok: list[str], no: int, kind: str) -> int:
    if len(tok) != 2 or tok[0] != kind or not tok[1].startswith("k="):
        raise InputError(f"expected header '{kind} k=<k>'", no)
    k = _int(tok[1][2:], no, "k")
    if k < 1:
        raise InputError("k must be positive", no)
    return k


def _colors(tok: str, no: int) -> frozenset[int]:
    if tok == "-":
        return frozenset()
    return frozenset(_int(x, no, "color") for x in tok.split(","))


def _fmt_colors(cs) -> str:
    return ",".join(str(c) for c in sorted(cs)) if cs else "-"


# ---------------------------------------------------------------- graphs

def dump_graph(g: ColoredGraph) -> str:
    out = [f"graph k={g.k}"]
    out += [f"v {v} {g.color(v)}" for v in g.vertices]
    out += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(out) + "\n"


def _graph_body(k: int, items: list[tuple[int, list[str]]]):
    colors: dict[int, int] = {}
    edges = []
    rest = []
    for no, tok in items:
        if tok[0] == "v":
            if len(tok) != 3:
                raise InputError("vertex line is 'v <id> <color>'", no)
            v, c = _int(tok[1], no, "vertex id"), _int(tok[2], no, "color")
            if v in colors:
                raise InputError(f"vertex {v} declared twice", no)
            if not 1 <= c <= k:
                raise InputError(f"color {c} outside 1..{k}", no)
            colors[v] = c
        elif tok[0] == "e":
            if len(tok) != 3:
                raise InputError("edge line is 'e <id> <id>'", no)
            u, v = _int(tok[1], no, "vertex id"), _int(tok[2], no, "vertex id")
            if u == v:
                raise InputError(f"loop at {u}", no)
            edges.append((u, v, no))
        else:
            rest.append((no, tok))
    for u, v, no in edges:
        for x in (u, v):
            if x not in colors:
                raise InputError(f"edge mentions undeclared vertex {x}", no)
    g = ColoredGraph(k, colors, [(u, v) for u, v, _ in edges])
    return g, rest


def parse_graph(text: str) -> ColoredGraph:
    items = list(_lines(text))
    if not items:
        raise InputError("empty graph file", 1)
    k = _header(items[0][1], items[0][0], "graph")
    g, rest = _graph_body(k, items[1:])
    if rest:
        no, tok = rest[0]
        raise InputError(f"unexpected line {' '.join(tok)!r}", no)
    return g


# ---------------------------------------------------------------- terms

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokens(text: str) -> list[tuple[str, int]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        out += [(m.group(0), no) for m in _TOKEN.finditer(line)]
    return out


def dump_term(t: Term, k: int | None = None) -> str:
    """One-line s-expression; recolor nodes list the images of 1..k."""
    used = colors_mentioned(t)
    k = max([k or 0, *used]) if used or k else 1
    text: dict[int, str] = {}
    for n in postorder(t):
        if isinstance(n, Empty):
            s = "(empty)"
        elif isinstance(n, Const):
            s = f"(const {n.color} {n.vertex})"
        elif isinstance(n, Recolor):
            imgs = " ".join(str(n.apply(c)) for c in range(1, k + 1))
            s = f"(recolor ({imgs}) {text[id(n.child)]})"
        else:
            ps = " ".join(f"({c} {d})" for c, d in sorted(n.pairs))
            s = "(join (" + ps + ") " + " ".join(text[id(c)] for c in n.children) + ")"
        text[id(n)] = s
    return text[id(t)] + "\n"


def parse_term(text: str) -> Term:
    """Parse the s-expression term format.

    ``(const <i>)`` without an id gets the next unused id, numbered in leaf
    order after all explicit ids.
    """
    toks = _tokens(text)
    if not toks:
        raise InputError("empty term file", 1)
    pos = 0

    def need(tok: str):
        nonlocal pos
        if pos >= len(toks):
            raise InputError(f"unexpected end of input, expected {tok!r}", toks[-1][1])
        if toks[pos][0] != tok:
            raise InputError(f"expected {tok!r}, got {toks[pos][0]!r}", toks[pos][1])
        pos += 1

    def num() -> int:
        nonlocal pos
        if pos >= len(toks):
            raise InputError("unexpected end of input", toks[-1][1])
        v, no = toks[pos]
        pos += 1
        return _int(v, no, "number")

    def int_list() -> list[int]:
        need("(")
        out = []
        while pos < len(toks) and toks[pos][0] != ")":
            out.append(num())
        need(")")
        return out

    # explicit stack of frames: [kind, line, data, children]
    stack: list[list] = []
    result = None
    pending_ids: list[tuple] = []
    rec_len: tuple[int, int] | None = None  # (images per recolor, line)
    top = 0  # largest color seen
    while True:
        if pos >= len(toks):
            raise InputError("unexpected end of input", toks[-1][1])
        tok, no = toks[pos]
        node = None
        if tok == "(":
            pos += 1
            if pos >= len(toks):
                raise InputError("unexpected end of input", no)
            head, hno = toks[pos]
            pos += 1
            if head == "empty":
                need(")")
                node = EMPTY
            elif head == "const":
                c = num()
                if c < 1:
                    raise InputError(f"color {c} must be positive", hno)
                top = max(top, c)
                if pos < len(toks) and toks[pos][0] != ")":
                    node = Const(c, num())
                else:
                    node = ["const", c, hno]
                    pending_ids.append(node)
                need(")")
            elif head == "recolor":
                imgs = int_list()
                if not imgs or any(x < 1 for x in imgs):
                    raise InputError("recolor images must be positive", hno)
                if rec_len is None:
                    rec_len = (len(imgs), hno)
                elif len(imgs) != rec_len[0]:
                    raise InputError(f"recolor lists {len(imgs)} images but line {rec_len[1]} lists {rec_len[0]}", hno)
                top = max(top, *imgs)
                mapping = tuple((i, x) for i, x in enumerate(imgs, start=1) if i != x)
                stack.append(["recolor", hno, mapping, []])
                continue
            elif head == "join":
                need("(")
                pairs = []
                while pos < len(toks) and toks[pos][0] == "(":
                    p = int_list()
                    if len(p) not in (1, 2) or any(x < 1 for x in p):
                        raise InputError(f"join pair {p} must hold one or two positive colors", hno)
                    pairs.append(p)
                    top = max(top, *p)
                need(")")
                stack.append(["join", hno, pairs, []])
                continue
            else:
                raise InputError(f"unknown term head {head!r}", hno)
        elif tok == ")":
            if not stack:
                raise InputError("unbalanced ')'", no)
            kind, fno, data, kids = stack.pop()
            pos += 1
            if kind == "recolor":
                if len(kids) != 1:
                    raise InputError("recolor takes exactly one child", fno)
                node = ("recolor", data, kids[0])
            else:
                if not kids:
                    raise InputError("join needs at least one child", fno)
                node = ("join", data, kids)
        else:
            raise InputError(f"unexpected token {tok!r}", no)
        if stack:
            stack[-1][3].append(node)
        else:
            result = node
            break
    if pos != len(toks):
        raise InputError(f"trailing input {toks[pos][0]!r}", toks[pos][1])
    if rec_len is not None and top > rec_len[0]:
        raise InputError(f"color {top} exceeds the {rec_len[0]} colors listed by recolor nodes", rec_len[1])

    # assign ids to bare constants, then build nodes bottom-up (iteratively)
    explicit: set[int] = set()
    todo = [result]
    order = []
    while todo:
        x = todo.pop()
        order.append(x)
        if isinstance(x, Const):
            if x.vertex in explicit:
                raise InputError(f"vertex id {x.vertex} used by two leaves")
            explicit.add(x.vertex)
        elif isinstance(x, tuple):
            todo.extend([x[2]] if x[0] == "recolor" else x[2])
    nxt = max(explicit, default=0) + 1
    for p in pending_ids:
        p.append(nxt)
        nxt += 1
    built: dict[int, Term] = {}

    def get(x):
        if isinstance(x, list):
            return Const(x[1], x[3])
        if isinstance(x, tuple):
            return built[id(x)]
        return x

    for x in reversed(order):
        if isinstance(x, tuple):
            if x[0] == "recolor":
                built[id(x)] = Recolor(x[1], get(x[2]))
            else:
                built[id(x)] = Join(_pairs(x[1]), tuple(get(c) for c in x[2]))
    return get(result)


def _pairs(ps) -> frozenset:
    out = set()
    for p in ps:
        c, d = (p[0], p[0]) if len(p) == 1 else p
        out.add((min(c, d), max(c, d)))
    return frozenset(out)


# ---------------------------------------------------------------- words

def dump_word(w: LinearWord) -> str:
    out = [f"word k={w.k}"]
    for ins in w.instructions:
        if isinstance(ins, AddVertex):
            out.append(f"a {ins.color} {_fmt_colors(ins.profile)} {ins.vertex}")
        else:
            out.append("r " + " ".join(map(str, ins.images)))
    return "\n".join(out) + "\n"


def parse_word(text: str) -> LinearWord:
    """Word file; the ``word k=<k>`` header is optional (k is then inferred)."""
    items = list(_lines(text))
    k = None
    if items and items[0][1][0] == "word":
        k = _header(items[0][1], items[0][0], "word")
        items = items[1:]
    ins = []
    seen_max = 1
    for no, tok in items:
        if tok[0] == "a":
            if len(tok) != 4:
                raise InputError("add line is 'a <color> <profile|-> <id>'", no)
            c = _int(tok[1], no, "color")
            X = _colors(tok[2], no)
            v = _int(tok[3], no, "vertex id")
            if c < 1 or any(x < 1 for x in X):
                raise InputError("colors must be positive", no)
            if k is not None and (c > k or any(x > k for x in X)):
                raise InputError(f"color outside 1..{k}", no)
            seen_max = max(seen_max, c, *X)
            ins.append((no, AddVertex(c, X, v)))
        elif tok[0] == "r":
            imgs = tuple(_int(x, no, "image") for x in tok[1:])
            if not imgs:
                raise InputError("recolor line needs images", no)
            if k is None:
                k = len(imgs)
            if len(imgs) != k or any(not 1 <= x <= k for x in imgs):
                raise InputError(f"recolor must list {k} images in 1..{k}", no)
            ins.append((no, RecolorInstr(imgs)))
        else:
            raise InputError(f"unknown instruction {tok[0]!r}", no)
    k = seen_max if k is None else k
    if seen_max > k:
        bad = next(no for no, i in ins if isinstance(i, AddVertex) and max(i.color, *i.profile) > k)
        raise InputError(f"color outside 1..{k}", bad)
    seen: dict[int, int] = {}
    for no, i in ins:
        if isinstance(i, AddVertex):
            if i.vertex in seen:
                raise InputError(f"vertex id {i.vertex} already added on line {seen[i.vertex]}", no)
            seen[i.vertex] = no
    return LinearWord(k, tuple(i for _, i in ins))


# ---------------------------------------------------------------- derivations

def dump_derivation(s: Derivation) -> str:
    body = dump_graph(s.G)
    prof = [f"p {v} {_fmt_colors(set_of(s.lam[v]))}" for v in s.G.vertices]
    return body + "\n".join(prof + ["phi " + " ".join(map(str, s.phi))]) + "\n"


def parse_derivation(text: str) -> Derivation:
    items = list(_lines(text))
    if not items:
        raise InputError("empty derivation file", 1)
    k = _header(items[0][1], items[0][0], "graph")
    g, rest = _graph_body(k, items[1:])
    lam: dict[int, int] = {}
    phi = None
    last = items[-1][0]
    for no, tok in rest:
        if tok[0] == "p":
            if len(tok) != 3:
                raise InputError("profile line is 'p <id> <profile|->'", no)
            v = _int(tok[1], no, "vertex id")
            X = _colors(tok[2], no)
            if v not in g.vertex_set():
                raise InputError(f"profile for undeclared vertex {v}", no)
            if any(not 1 <= x <= k for x in X):
                raise InputError(f"profile color outside 1..{k}", no)
            lam[v] = mask_of(X)
        elif tok[0] == "phi":
            phi = tuple(_int(x, no, "image") for x in tok[1:])
            if len(phi) != k or any(not 1 <= x <= k for x in phi):
                raise InputError(f"phi must list {k} images in 1..{k}", no)
        else:
            raise InputError(f"unexpected line {' '.join(tok)!r}", no)
    if phi is None:
        raise InputError("missing 'phi' line", last)
    missing = g.vertex_set() - lam.keys()
    if missing:
        raise InputError(f"no profile for vertex {min(missing)}", last)
    return Derivation(g, lam, phi)


# ---------------------------------------------------------------- abstractions

def _fmt_cell(c) -> str:
    return f"{c[0]}/{_fmt_colors(set_of(c[1]))}"


def _parse_cell(tok: str, no: int):
    if "/" not in tok:
        raise InputError(f"cell {tok!r} is not '<color>/<profile>'", no)
    a, b = tok.split("/", 1)
    return (_int(a, no, "cell color"), mask_of(_colors(b, no)))


def _fmt_seq(xs) -> str:
    return " ".join(xs) if xs else "-"


def _fmt_Z(Z) -> str:
    return _fmt_seq([f"{_fmt_cell(c)}~{_fmt_cell(d)}" for c, d in sorted(Z)])


def dump_abstraction(a: Abstraction) -> str:
    k = len(a.phi)
    out = [f"abstraction k={k}", "L: " + _fmt_seq([_fmt_cell(c) for c in sorted(a.L)]),
           "phi: " + " ".join(map(str, a.phi))]
    out.append("Z: " + " | ".join(_fmt_Z(Z) for Z in sorted(a.zfamily, key=sorted)))
    out.append("rho:")
    rows = sorted(a.rho, key=lambda r: (sorted(r[0]), r[1], r[2], sorted(r[3])))
    for Z, c, d, W in rows:
        out.append(f"({_fmt_Z(Z)} | {_fmt_cell(c)} | {_fmt_cell(d)} | {_fmt_seq([_fmt_cell(x) for x in sorted(W)])})")
    return "\n".join(out) + "\n"


def parse_abstraction(text: str) -> Abstraction:
    lines = [(no, raw.split("#", 1)[0].strip()) for no, raw in enumerate(text.splitlines(), start=1)]
    lines = [(no, s) for no, s in lines if s]
    if not lines:
        raise InputError("empty abstraction file", 1)
    _header(lines[0][1].split(), lines[0][0], "abstraction")

    def field(i: int, name: str) -> str:
        if i >= len(lines) or not lines[i][1].startswith(name + ":"):
            raise InputError(f"expected '{name}:' line", lines[min(i, len(lines) - 1)][0])
        return lines[i][1][len(name) + 1:].strip()

    def cells(s: str, no: int) -> frozenset:
        return frozenset() if s in ("", "-") else frozenset(_parse_cell(t, no) for t in s.split())

    def zset(s: str, no: int) -> frozenset:
        if s in ("", "-"):
            return frozenset()
        out = set()
        for t in s.split():
            if "~" not in t:
                raise InputError(f"Z pair {t!r} is not 'c~d'", no)
            a, b = t.split("~", 1)
            out.add((_parse_cell(a, no), _parse_cell(b, no)))
        return frozenset(out)

    L = cells(field(1, "L"), lines[1][0])
    phi = tuple(_int(x, lines[2][0], "image") for x in field(2, "phi").split())
    zf = frozenset(zset(p.strip(), lines[3][0]) for p in field(3, "Z").split("|"))
    field(4, "rho")
    rho = set()
    for no, s in lines[5:]:
        if not (s.startswith("(") and s.endswith(")")):
            raise InputError("registry row must be '(Z | c | d | W)'", no)
        parts = [p.strip() for p in s[1:-1].split("|")]
        if len(parts) != 4:
            raise InputError("registry row must have four fields", no)
        rho.add((zset(parts[0], no), _parse_cell(parts[1], no), _parse_cell(parts[2], no), cells(parts[3], no)))
    return Abstraction(L, frozenset(rho), phi, zf)


def sniff(text: str) -> str:
    """Best guess of a file's kind: graph, derivation, word, term, abstraction or forest."""
    for _, tok in _lines(text):
        head = tok[0]
        if head.startswith("("):
            return "term"
        if head == "graph":
            return "derivation" if re.search(r"^\s*phi\b", text, re.M) else "graph"
        if head in ("word", "a", "r"):
            return "word"
        if head == "abstraction":
            return "abstraction"
        if head in ("L", "B", "I"):
            return "forest"
        return "unknown"
    return "unknown"
