"""Three 4-cliques chained by two bridges, built three ways.

A linear word adds one vertex at a time; a tree term builds the cliques
separately and joins them; the decomposer turns the word into a tree term
of bounded width.  All three evaluate to the same 12-vertex graph.
"""
from cwforge.decomposer import decompose, verify_decomposition
from cwforge.formats import dump_term, parse_word
from cwforge.terms import Const, eval_term, eval_word, linear_to_term, make_join, width

WORD = """word k=3
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

w = parse_word(WORD)
g = eval_word(w)
print(f"word: {len(w)} instructions -> {len(g)} vertices, {g.num_edges()} edges")

cliques = [
    make_join([(1,), (1, 2)], [Const(1, 1), Const(1, 2), Const(1, 3), Const(2, 4)]),
    make_join([(1,), (1, 2), (1, 3), (2, 3)], [Const(1, 6), Const(1, 7), Const(2, 5), Const(3, 8)]),
    make_join([(1,), (1, 3)], [Const(1, 10), Const(1, 11), Const(1, 12), Const(3, 9)]),
]
tree = make_join([(2,), (3,)], cliques)
print("hand-built tree term gives the same edges:", eval_term(tree).edge_set() == g.edge_set())

emb = linear_to_term(w)
print(f"word embedded as a term: width {width(emb)} (one spare color beyond k={w.k})")

r = decompose(w)
print(f"decomposer: width {r.width}, forest depth {r.forest_depth}, verified {bool(verify_decomposition(w, r))}")
print("term:", dump_term(r.term)[:120], "...")
