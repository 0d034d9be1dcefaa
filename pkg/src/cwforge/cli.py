"""Command line entry point.

Exit codes: 0 success, 1 a check failed, 2 bad input or usage.
``CW_FORGE_THREADS`` sets the worker count for multi-case commands.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

from .automata import parse_automaton, run
from .decomposer import decompose, verify_decomposition, word_forest
from .errors import InputError, InvariantError
from .factorization import dump_forest
from .formats import dump_graph, dump_term, dump_word, parse_term, parse_word, sniff
from .generators import GenSpec, gen_word
from .orderlab import CLAIMS, claims_suite, power_context
from .terms import colors_mentioned, eval_term, eval_word

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _threads() -> int:
    raw = os.environ.get("CW_FORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"CW_FORGE_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over a worker pool."""
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_word(path: str):
    return parse_word(_read(path))


# ---------------------------------------------------------------- subcommands

def cmd_eval(a) -> int:
    text = _read(a.file)
    kind = sniff(text)
    if kind == "word":
        g = eval_word(parse_word(text))
    elif kind == "term":
        t = parse_term(text)
        g = eval_term(t, k=a.k or max(colors_mentioned(t), default=1))
    else:
        raise InputError(f"{a.file}: expected a word or a term file")
    _emit(dump_graph(g), a.out)
    return EXIT_OK


def _stats_table(r) -> str:
    rows = [f"k               {r.k}", f"width           {r.width}",
            f"width bound     {r.width_bound if r.width_bound is not None else '-'}",
            f"forest depth    {r.forest_depth}", f"forest method   {r.forest_method}",
            f"forest bound    {r.forest_bound if r.forest_bound is not None else '-'}",
            f"seconds         {r.stats.get('seconds', 0):.3f}", "level  width"]
    rows += [f"{h:5d}  {w}" for h, w in enumerate(r.per_level_widths, start=1)]
    return "\n".join(rows) + "\n"


def cmd_decompose(a) -> int:
    words = [(p, _load_word(p)) for p in a.files]
    many = len(words) > 1
    if many and a.out:
        Path(a.out).mkdir(parents=True, exist_ok=True)

    def work(item):
        path, w = item
        r = decompose(w, check=a.check, mode=a.mode)
        rep = verify_decomposition(w, r) if a.verify else None
        return path, w, r, rep

    status = EXIT_OK
    for path, w, r, rep in _pmap(work, words):
        text = dump_term(r.term)
        if many:
            target = str(Path(a.out) / (Path(path).stem + ".term")) if a.out else None
            if target is None:
                sys.stdout.write(f"# {path}\n")
        else:
            target = a.out
        _emit(text, target)
        if a.stats:
            (sys.stdout if a.out else sys.stderr).write(f"# {path}\n" + _stats_table(r))
        if rep is not None and not rep.ok:
            sys.stderr.write(f"{path}: verification failed: {rep.message}\n")
            status = EXIT_FAIL
    return status


def cmd_verify(a) -> int:
    w = _load_word(a.word)
    t = parse_term(_read(a.term))
    rep = verify_decomposition(w, t)
    if rep.ok:
        print("OK")
        return EXIT_OK
    print(f"FAIL {rep.message}")
    return EXIT_FAIL


def cmd_forest(a) -> int:
    f = word_forest(_load_word(a.file), a.cap, a.green_max_k)
    if a.depth:
        _emit(f"{f.depth}\n", a.out)
    else:
        _emit(dump_forest(f.root), a.out)
    return EXIT_OK


def cmd_orderlab(a) -> int:
    names = list(CLAIMS) if a.claims == "all" else [x.strip() for x in a.claims.split(",") if x.strip()]
    unknown = [x for x in names if x not in CLAIMS]
    if unknown:
        raise InputError(f"unknown claim(s) {', '.join(unknown)}; known: {', '.join(CLAIMS)}")
    seeds = list(range(a.seed, a.seed + a.count))

    def work(seed):
        ctx = power_context(a.k, a.n, seed, a.max_base, a.max_vertices)
        return seed, claims_suite(ctx, names)

    ok = True
    lines = []
    for seed, rep in _pmap(work, seeds):
        prefix = f"seed={seed} " if a.count > 1 else ""
        lines += [prefix + ln for ln in rep.lines()]
        ok &= rep.ok
    _emit("\n".join(lines) + "\n", a.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_recognize(a) -> int:
    t = parse_term(_read(a.file))
    k = a.k or max(colors_mentioned(t), default=1)
    res = run(parse_automaton(a.automaton, k), t)
    _emit(("ACCEPT" if res.accepted else "REJECT") + "\n", a.out)
    return EXIT_OK


def cmd_gen(a) -> int:
    length = a.length if a.length is not None else a.n
    if length is None:
        raise InputError("gen needs --length (or --n)")
    spec = GenSpec(a.k, length, a.seed, a.add_weight, a.recolor_weight, a.density)
    _emit(dump_word(gen_word(spec)), a.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cwforge", description="Clique-width decomposition toolkit.")
    sub = p.add_subparsers(dest="cmd", metavar="<command>")
    sub.required = True

    s = sub.add_parser("eval", help="evaluate a word or term file to a graph file")
    s.add_argument("file")
    s.add_argument("--k", type=int, default=None, help="color budget for term input")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("decompose", help="bounded-width term from a linear word")
    s.add_argument("files", nargs="+")
    s.add_argument("--out", help="output file (or directory when several inputs)")
    s.add_argument("--stats", action="store_true", help="print width and depth table")
    s.add_argument("--verify", action="store_true", help="check the output against the word")
    s.add_argument("--check", action="store_true", help="verify every intermediate node")
    s.add_argument("--mode", choices=("cells", "colors"), default="cells")
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("verify", help="check a term against a word")
    s.add_argument("word")
    s.add_argument("term")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("forest", help="factorization forest of a word's abstractions")
    s.add_argument("file")
    s.add_argument("--depth", action="store_true", help="print the depth only")
    s.add_argument("--cap", type=int, default=200_000)
    s.add_argument("--green-max-k", type=int, default=2)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_forest)

    s = sub.add_parser("orderlab", help="block-order claims on power products")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=1, help="number of consecutive seeds")
    s.add_argument("--claims", default="all", help="comma list or 'all'")
    s.add_argument("--max-base", type=int, default=3)
    s.add_argument("--max-vertices", type=int, default=6)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_orderlab)

    s = sub.add_parser("recognize", help="run an automaton on a term file")
    s.add_argument("file")
    s.add_argument("--automaton", required=True, help="modp:<p> or connected")
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_recognize)

    s = sub.add_parser("gen", help="seeded random word")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--length", type=int, default=None)
    s.add_argument("--n", type=int, default=None, help="alias for --length")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--add-weight", type=float, default=0.8)
    s.add_argument("--recolor-weight", type=float, default=0.2)
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_gen)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:  # argparse: usage errors exit 2, --help exits 0
        return int(e.code or 0)
    try:
        return a.fn(a)
    except InputError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except InvariantError as e:
        sys.stderr.write(f"internal check failed: {e}\n")
        return EXIT_FAIL
    except BrokenPipeError:  # reader went away, e.g. piped into head
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
