"""The running example: three 4-cliques chained by two bridge edges."""
from cwforge.terms import Const, make_join

CHAIN_WORD = """\
word k=3
a 1 - 1
a 1 1 2
a 1 1 3
a 2 1 4
a 3 2 5
r 1 1 2
a 2 2 6
a 2 2 7
a 3 2 8
r 1 1 2
a 3 2 9
a 3 3 10
a 3 3 11
a 3 3 12
"""

_CLIQUES = [(1, 2, 3, 4), (5, 6, 7, 8), (9, 10, 11, 12)]
CHAIN_EDGES = frozenset(
    [(a, b) for q in _CLIQUES for i, a in enumerate(q) for b in q[i + 1:]] + [(4, 5), (8, 9)]
)


def chain_term():
    theta1 = make_join([(1,), (1, 2)], [Const(1, 1), Const(1, 2), Const(1, 3), Const(2, 4)])
    theta2 = make_join([(1,), (1, 2), (1, 3), (2, 3)], [Const(1, 6), Const(1, 7), Const(2, 5), Const(3, 8)])
    theta3 = make_join([(1,), (1, 3)], [Const(1, 10), Const(1, 11), Const(1, 12), Const(3, 9)])
    return make_join([(2,), (3,)], [theta1, theta2, theta3])


def theta1():
    return make_join([(1,), (1, 2)], [Const(1, 1), Const(1, 2), Const(1, 3), Const(2, 4)])
