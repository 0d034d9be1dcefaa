"""Factorization forests over a three-element semigroup.

The semigroup is the two-element group with a zero adjoined.  Depth is
compared against the exhaustive minimum on short words and watched on
long random words, where it levels off.
"""
import itertools
import random

from cwforge.factorization import FiniteSemigroupView, build_forest, dump_forest, verify_forest


def mul(x, y):
    if "z" in (x, y):
        return "z"
    return "e" if x == y else "g"


sg = FiniteSemigroupView(mul, ["e", "g", "z"])
w = list("gggegzzz")
f = build_forest(w, sg)
print("forest for", "".join(w), f"(depth {f.depth}, bound {f.bound}):")
print(dump_forest(f.root))

print("length  max depth over 20 random words")
for n in (8, 64, 512, 4096):
    rnd = random.Random(n)
    worst = 0
    for _ in range(20):
        word = [rnd.choice("egz") for _ in range(n)]
        f = build_forest(word, sg)
        assert verify_forest(f.root, word, sg)
        worst = max(worst, f.depth)
    print(f"{n:6d}  {worst}")

total = sum(1 for n in range(1, 7) for _ in itertools.product("egz", repeat=n))
print(f"\n{total} words of length <= 6 are checked exhaustively in the test suite")
