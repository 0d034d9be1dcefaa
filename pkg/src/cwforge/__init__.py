"""Clique-width algebra: terms, derivations, abstractions, factorization
forests, a bounded-width decomposer, a block-order lab and term automata."""
from .abstraction import Abstraction, Reduced, abstract, reduced, reduced_compose
from .automata import TermAutomaton, automaton_connectivity, automaton_mod_p, run
from .decomposer import DecomposeResult, decompose, verify_decomposition
from .derivations import Derivation, atomic, block_product, compose, from_word, product, zflip
from .errors import InputError, InvariantError, SemigroupTooLarge
from .factorization import FiniteSemigroupView, build_forest, verify_forest
from .generators import GenSpec, gen_word
from .graphs import ColoredGraph, connected_components, flip, partition_rank
from .terms import (EMPTY, AddVertex, Const, Join, LinearWord, Recolor, RecolorInstr, eval_term,
                    eval_word, linear_to_term, width)

__version__ = "0.1.0"

__all__ = [
    "Abstraction",
    "Reduced",
    "abstract",
    "reduced",
    "reduced_compose",
    "TermAutomaton",
    "automaton_connectivity",
    "automaton_mod_p",
    "run",
    "DecomposeResult",
    "decompose",
    "verify_decomposition",
    "Derivation",
    "atomic",
    "block_product",
    "compose",
    "from_word",
    "product",
    "zflip",
    "InputError",
    "InvariantError",
    "SemigroupTooLarge",
    "FiniteSemigroupView",
    "build_forest",
    "verify_forest",
    "GenSpec",
    "gen_word",
    "ColoredGraph",
    "connected_components",
    "flip",
    "partition_rank",
    "EMPTY",
    "AddVertex",
    "Const",
    "Join",
    "LinearWord",
    "Recolor",
    "RecolorInstr",
    "eval_term",
    "eval_word",
    "linear_to_term",
    "width",
]
