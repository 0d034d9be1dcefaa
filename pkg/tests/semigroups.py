"""Small fixed semigroups for forest tests."""
from cwforge.factorization import FiniteSemigroupView


def _z2_zero(x, y):
    if x == "z" or y == "z":
        return "z"
    return "e" if x == y else "g"


# the cyclic group of order two with an adjoined zero
Z2_ZERO = FiniteSemigroupView(_z2_zero, ["e", "g", "z"], name="Z2+0")
LEFT_ZERO = FiniteSemigroupView(lambda x, y: x, ["a", "b", "c"], name="left zero")
Z3 = FiniteSemigroupView(lambda x, y: (x + y) % 3, [0, 1, 2], name="Z3")
# right-zero band {a, b} with an identity 1 adjoined
FLIP_FLOP = FiniteSemigroupView(lambda x, y: x if y == 1 else y, [1, "a", "b"], name="flip-flop")
NOT_ASSOC = FiniteSemigroupView(lambda x, y: (x - y) % 3, [0, 1, 2], name="subtraction")

ALL = [Z2_ZERO, LEFT_ZERO, Z3, FLIP_FLOP]
