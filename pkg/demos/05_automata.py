"""Finite-state checks running on decomposer output.

Connectivity and vertex count mod p are decided bottom-up on the term, and
each verdict is compared with a direct computation on the evaluated graph.
"""
from cwforge.automata import automaton_connectivity, automaton_mod_p, run
from cwforge.decomposer import decompose
from cwforge.generators import GenSpec, gen_word
from cwforge.graphs import connected_components
from cwforge.terms import eval_term

print(f"{'seed':>4} {'n':>4} {'width':>5} {'connected':>10} {'direct':>7} {'n mod 3 == 0':>13}")
for seed in range(8):
    w = gen_word(GenSpec(2, 40, seed=seed, density=0.15))
    r = decompose(w)
    a = automaton_connectivity(r.width)
    g = eval_term(r.term, r.width)
    conn = run(a, r.term).accepted
    direct = len(connected_components(g)) == 1
    mod3 = run(automaton_mod_p(3), r.term).accepted
    print(f"{seed:4d} {len(g):4d} {r.width:5d} {str(conn):>10} {str(direct):>7} {str(mod3):>13}")
    assert conn == direct and mod3 == (len(g) % 3 == 0)
