import itertools

import pytest
from hypothesis import given, settings, strategies as st

from prehist import corpus
from prehist.acceptance import truth_table_valid
from prehist.families import has_cycle, prehistoric_graph
from prehist.proofs import check_proof, parse_sequent, Sequent
from prehist.prover import (
    BOUND, CYCLE_FREE, NO_CYCLE_FREE, PROVED, UNPROVABLE, decide_g3s, find_cycle_free_proof, search_g3lp,
)
from prehist.syntax import And, Atom, Bottom, Implies, Not, Or
from prehist.transforms import project_proof


def seq(text):
    return parse_sequent(text)


def test_decide_examples():
    r = decide_g3s(seq("=> ~[](P & ~[]P)"))
    assert r.kind == PROVED and check_proof(r.proof, "g3s").ok
    assert decide_g3s(seq("=> [](P & ~[]P -> P) -> P")).kind == UNPROVABLE
    assert decide_g3s(seq("=> P -> []P")).kind == UNPROVABLE


def test_s4_axioms_provable():
    for text in ("=> [](P -> Q) -> []P -> []Q", "=> []P -> P", "=> []P -> [][]P", "=> P -> <>P",
                 "=> <><>P -> <>P", "=> ~<>P -> []~P"):
        r = decide_g3s(seq(text))
        assert r.proved, text
        assert check_proof(r.proof, "g3s").ok
    assert not decide_g3s(seq("=> <>P -> []<>P")).proved  # S5, not S4


def test_cycle_free_examples():
    assert find_cycle_free_proof(seq("=> ~[](P & ~[]P)")).kind == NO_CYCLE_FREE
    assert find_cycle_free_proof(seq("=> [](P & ~[]P -> P) -> ~[](P & ~[]P)")).kind == NO_CYCLE_FREE
    r = find_cycle_free_proof(seq("=> []P -> []P"))
    assert r.kind == CYCLE_FREE
    assert check_proof(r.proof, "g3s").ok
    assert not has_cycle(prehistoric_graph(r.proof, "g3s-principal"))


def test_cycle_free_rejects_diamond():
    with pytest.raises(ValueError):
        find_cycle_free_proof(seq("=> <>P -> <>P"))


def test_g3lp_examples():
    r = search_g3lp(seq("=> y:(P & ~(y*x):P -> P) -> ~x:(P & ~(y*x):P)"), forbid_const_intro=True)
    assert r.kind == PROVED and check_proof(r.proof, "g3lp").ok
    r = search_g3lp(seq("=> ~x:(P & ~(t*x):P)"), forbid_const_intro=False)
    assert r.kind == PROVED and check_proof(r.proof, "g3lp").ok
    assert project_proof(r.proof).proof.sequent == seq("=> ~[](P & ~[]P)")
    for flag in (False, True):
        assert search_g3lp(seq("=> x:P"), forbid_const_intro=flag, depth_bound=8).kind in (UNPROVABLE, BOUND)


def test_g3lp_forbid_blocks_constants():
    assert search_g3lp(seq("=> c:(P -> P)")).proved
    assert not search_g3lp(seq("=> c:(P -> P)"), forbid_const_intro=True).proved


def _props(depth, atoms):
    leaf = st.one_of(st.sampled_from(atoms).map(Atom), st.just(Bottom()))
    return st.recursive(leaf, lambda s: st.one_of(
        st.builds(Not, s), st.builds(And, s, s), st.builds(Or, s, s), st.builds(Implies, s, s)), max_leaves=depth)


ATOMS = ("P", "Q", "R")


@settings(max_examples=600, deadline=None)
@given(st.lists(_props(6, ATOMS), max_size=2), st.lists(_props(6, ATOMS), max_size=2))
def test_truth_table_agreement(ant, suc):
    s = Sequent(tuple(ant), tuple(suc))
    r = decide_g3s(s)
    assert r.proved == truth_table_valid(s.ant, s.suc, ATOMS)
    if r.proved:
        assert check_proof(r.proof, "g3s").ok


def test_truth_table_exhaustive_small():
    # every sequent A ⊃ B with A, B drawn from all formulas of depth ≤ 1 over P, Q
    base = [Atom("P"), Atom("Q"), Bottom()]
    ones = base + [Not(a) for a in base] + [c(a, b) for c in (And, Or, Implies) for a in base for b in base]
    for a, b in itertools.product(ones, repeat=2):
        s = Sequent((a,), (b,))
        assert decide_g3s(s).proved == truth_table_valid(s.ant, s.suc, ("P", "Q"))


@pytest.fixture(scope="module")
def proofs():
    return corpus.cut_free_corpus(120, seed=21)


def test_cycle_free_consistency(proofs):
    for p in proofs:
        s = p.sequent
        r = find_cycle_free_proof(s)
        if r.kind == CYCLE_FREE:
            assert decide_g3s(s).proved
            assert check_proof(r.proof, "g3s").ok
            assert not has_cycle(prehistoric_graph(r.proof, "g3s-principal"))
        # an externally supplied cycle-free proof falsifies any absence claim
        if not has_cycle(prehistoric_graph(p, "g3s-principal")):
            assert r.kind == CYCLE_FREE


def test_determinism():
    for text in ("=> ~[](P & ~[]P)", "=> [](P -> Q) -> []P -> []Q", "[]P, []Q => [](P & Q)"):
        a, b = decide_g3s(seq(text)), decide_g3s(seq(text))
        assert a.to_json() == b.to_json()
        c, d = find_cycle_free_proof(seq(text)), find_cycle_free_proof(seq(text))
        assert c.to_json() == d.to_json()
