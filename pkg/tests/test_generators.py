import pytest

from cwforge.errors import InputError
from cwforge.generators import GenSpec, gen_derivation, gen_term, gen_word, rng_for
from cwforge.terms import AddVertex, RecolorInstr, leaves


def test_same_seed_same_word():
    spec = GenSpec(3, 80, seed=123)
    assert gen_word(spec) == gen_word(spec)
    assert gen_word(spec) != gen_word(GenSpec(3, 80, seed=124))


def test_length_one_is_an_add_vertex():
    for seed in range(20):
        w = gen_word(GenSpec(2, 1, seed=seed, add_weight=0.01, recolor_weight=0.99))
        assert isinstance(w.instructions[0], AddVertex)


def test_recolor_only_words_are_legal():
    w = gen_word(GenSpec(2, 5, seed=1, add_weight=0.0, recolor_weight=1.0))
    assert all(isinstance(i, RecolorInstr) for i in w.instructions)


def test_recolor_frequency():
    w = gen_word(GenSpec(2, 10_000, seed=5, add_weight=0.7, recolor_weight=0.3))
    frac = sum(isinstance(i, RecolorInstr) for i in w.instructions) / len(w)
    assert abs(frac - 0.3) <= 0.05


@pytest.mark.parametrize("kw", [dict(k=0, length=3), dict(k=1, length=0),
                                dict(k=1, length=3, add_weight=0, recolor_weight=0),
                                dict(k=1, length=3, add_weight=-1),
                                dict(k=1, length=3, density=1.5)])
def test_spec_validation(kw):
    with pytest.raises(InputError):
        GenSpec(**kw)


def test_streams_are_independent_and_stable():
    a = rng_for(9, 1).integers(0, 1 << 30, size=4).tolist()
    b = rng_for(9, 1).integers(0, 1 << 30, size=4).tolist()
    c = rng_for(9, 2).integers(0, 1 << 30, size=4).tolist()
    assert a == b and a != c


def test_term_and_derivation_generators():
    t = gen_term(rng_for(3), 3, 10)
    assert sorted(leaves(t)) == list(range(1, 11))
    s = gen_derivation(rng_for(3), 2, 5, first_id=40, min_vertices=2)
    assert 2 <= len(s.G) <= 5 and min(s.G.vertices) == 40
