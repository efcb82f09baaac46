import pytest
from hypothesis import given, settings, strategies as st

from prehist import corpus
from prehist.semantics import KripkeModel, eval as ev, is_s4_frame, s4_models, sequent_formula_holds
from prehist.syntax import Box, parse

from conftest import modal_formulas

SINGLETON = KripkeModel({0}, {(0, 0)}, {})


def test_singleton_model():
    assert ev(SINGLETON, 0, parse("[](P & ~[]P -> P) -> P")) is False
    assert ev(SINGLETON, 0, parse("[](P & ~[]P -> P)")) is True


def test_bottom_false_everywhere():
    for m in list(s4_models(2, ("P",)))[:20]:
        assert not any(ev(m, w, parse("bot")) for w in m.worlds)


def test_frame_conditions():
    assert is_s4_frame(SINGLETON)
    assert not is_s4_frame(KripkeModel({"a", "b"}, {("a", "b")}))
    refl = {(w, w) for w in "abc"}
    assert not is_s4_frame(KripkeModel(set("abc"), refl | {("a", "b"), ("b", "c")}))
    assert is_s4_frame(KripkeModel(set("abc"), refl | {("a", "b"), ("b", "c"), ("a", "c")}))


def test_model_validation():
    with pytest.raises(ValueError):
        KripkeModel({0}, {(0, 1)})
    with pytest.raises(KeyError):
        ev(SINGLETON, 5, parse("P"))


def test_json_round_trip():
    m = KripkeModel({0, 1}, {(0, 0), (1, 1), (0, 1)}, {"P": {1}})
    assert KripkeModel.from_json(m.to_json()) == m


MODELS = list(s4_models(2, ("P", "Q")))


def test_prover_sound_on_small_models():
    for p in corpus.cut_free_corpus(40, seed=3, gen=corpus.random_full):
        s = p.sequent
        for m in MODELS:
            assert all(sequent_formula_holds(m, w, s.ant, s.suc) for w in m.worlds)


@settings(max_examples=200, deadline=None)
@given(modal_formulas, st.integers(0, len(MODELS) - 1))
def test_box_truth_monotone(f, k):
    m = MODELS[k]
    bf = Box(f)
    for a, b in m.relation:
        if ev(m, a, bf):
            assert ev(m, b, bf)
