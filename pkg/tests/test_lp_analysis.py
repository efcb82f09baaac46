import random

import pytest
from hypothesis import given, strategies as st

from prehist import corpus
from prehist.acceptance import brute_selfref, random_term_set
from prehist.families import has_cycle, prehistoric_graph
from prehist.lp_analysis import (
    CYCLIC, DIRECT, NON_SELF_REFERENTIAL, ConstantSpecification, CycleAbsent, ShapeError, Step, apply_realization,
    check_hilbert, check_normal, classify_selfref, extract_selfref_chain, inputs_of, is_not_directly_self_referential,
    is_not_self_referential, load_hilbert, realization, term_cycle, verify_witness,
)
from prehist.proofs import AX, CONST_R, Principal, ProofNode, parse_sequent
from prehist.prover import decide_g3s, search_g3lp
from prehist.syntax import Box, forgetful_formula, parse, positions, render
from prehist.transforms import eliminate_all, project_proof

from conftest import modal_formulas, terms


def lp(text):
    return parse(text, "lp")


# ------------------------------------------------------------- Hilbert

def test_hilbert_mp_chain():
    a1 = lp("t:P -> P")
    taut = lp("(t:P -> P) -> (Q -> Q)")
    steps = [Step(a1, "axiom"), Step(taut, "axiom"), Step(lp("Q -> Q"), "mp", (1, 0))]
    res = check_hilbert(steps)
    assert res.accepted and res.cs == frozenset()


def test_hilbert_necessitation_builds_cs():
    a = lp("x:P -> P")
    res = check_hilbert([Step(a, "axiom"), Step(lp("c:(x:P -> P)"), "nec", (0,))])
    assert res.accepted
    assert res.cs == frozenset({lp("c:(x:P -> P)")})


def test_hilbert_forward_reference_rejected():
    steps = [Step(lp("t:P -> P"), "axiom"), Step(lp("Q -> Q"), "mp", (2, 0)), Step(lp("(t:P -> P) -> (Q -> Q)"), "axiom")]
    res = check_hilbert(steps)
    assert not res.accepted and res.errors[0][0] == 1


def test_hilbert_assumptions_and_json():
    steps, hyps = load_hilbert({"steps": [{"formula": "x:P", "rule": "assumption"},
                                          {"formula": "x:P -> P", "rule": "axiom"},
                                          {"formula": "P", "rule": "mp", "refs": [1, 0]}],
                                "assumptions": ["x:P"]})
    assert check_hilbert(steps, hyps).accepted
    assert not check_hilbert(steps, []).accepted


# ------------------------------------------------------- CS and inputs

def test_inputs_of_example(g3lp_example):
    ins = inputs_of(g3lp_example)
    assert {(render(f), s) for f, s in ins.items} == {
        ("(t*x):P", "t"), ("x:(P & ~(t*x):P)", "t"), ("t:(P & ~(t*x):P -> P)", "c")}
    assert ins.cs.formulas == frozenset({lp("t:(P & ~(t*x):P -> P)")})


def test_inputs_empty_without_term_rules():
    assert inputs_of(ProofNode(AX, parse_sequent("x:P => x:P"))).items == ()


def test_constant_specification_shape():
    with pytest.raises(ShapeError):
        ConstantSpecification(frozenset({lp("x:(P -> P)")}))
    with pytest.raises(ShapeError):
        ConstantSpecification(frozenset({lp("c:P")}))
    cs = ConstantSpecification(frozenset({lp("c:(P -> P)"), lp("c:(Q -> Q)")}))
    assert not cs.is_injective()


@pytest.fixture(scope="module")
def counterexample():
    r = search_g3lp(parse_sequent("=> y:(P & ~(y*x):P -> P) -> ~x:(P & ~(y*x):P)"), forbid_const_intro=True)
    assert r.proved
    return r.proof


def test_counterexample_cs_empty(counterexample):
    ins = inputs_of(counterexample)
    assert ins.cs.formulas == frozenset()
    assert all(s == "t" for _, s in ins.items)
    v = extract_selfref_chain(counterexample, term_cycle(counterexample))
    assert v.kind in (DIRECT, CYCLIC) and verify_witness(v)
    assert set(v.witness) <= set(ins.formulas)


# ---------------------------------------------------- self-reference

def test_selfref_examples():
    v = classify_selfref([lp("t:(P & ~(t*x):P -> P)")])
    assert v.kind == DIRECT
    assert classify_selfref([lp("c:(P -> P)")]).kind == NON_SELF_REFERENTIAL
    two = [lp("c0:(c1:P -> c1:P)"), lp("c1:(c0:Q -> c0:Q)")]
    v = classify_selfref(two)
    assert v.kind == CYCLIC and len(v.witness) == 2 and verify_witness(v)
    assert is_not_directly_self_referential(two) and not is_not_self_referential(two)


def test_selfref_rejects_non_proof_formula():
    with pytest.raises(ShapeError):
        classify_selfref([lp("P")])


def test_selfref_matches_brute_force():
    rng = random.Random(17)
    for _ in range(300):
        elems = random_term_set(rng, rng.randint(1, 8))
        v = classify_selfref(elems)
        assert verify_witness(v)
        b = brute_selfref(elems)
        if b is not None:
            assert len(v.witness) == b
        elif v.self_referential:
            assert len(v.witness) > 4


def test_extract_example(g3lp_example):
    v = extract_selfref_chain(g3lp_example, term_cycle(g3lp_example))
    assert v.kind == DIRECT
    assert lp("t:(P & ~(t*x):P -> P)") in v.witness


def test_extract_acyclic_raises():
    p = ProofNode(CONST_R, parse_sequent("=> c:(P -> P)"), Principal("suc", 0),
                  (decide_g3s(parse_sequent("=> P -> P")).proof,))
    assert term_cycle(p) is None
    with pytest.raises(CycleAbsent, match="cycle not present"):
        extract_selfref_chain(p, ["t0"])


@pytest.fixture(scope="module")
def lp_corpus():
    return corpus.g3lp_corpus(80, seed=5)


def test_nonselfreferential_inputs_give_acyclic_graphs(lp_corpus):
    for _, p in lp_corpus:
        ins = inputs_of(p)
        assert set(ins.cs.formulas) <= set(ins.formulas)
        assert all(s == "c" for f, s in ins.items if f in ins.cs.formulas)
        cyc = term_cycle(p)
        verdict = classify_selfref(ins)
        if cyc is not None:
            assert verdict.self_referential
            assert extract_selfref_chain(p, cyc).self_referential
        if not verdict.self_referential:
            assert cyc is None
            out = eliminate_all(project_proof(p).proof).output
            assert not has_cycle(prehistoric_graph(out, "all-box"))


# -------------------------------------------------------- realizations

def test_realization_example():
    af = parse("~[-0](P & ~[+0]P)")
    r = realization({"⊟0": "x", "⊞0": "t*x"})
    assert apply_realization(r, af) == lp("~x:(P & ~(t*x):P)")
    assert check_normal(r, af=af)


def test_normal_needs_distinct_variables():
    r = realization({"⊟0": "x", "⊟1": "x"})
    assert not check_normal(r)
    assert check_normal(realization({"⊟0": "x", "⊟1": "y"}))
    assert not check_normal(realization({"⊡0": "c"}))


_SYMS = [("n", 0), ("n", 1), ("o", 0), ("p", 0), ("p", 1)]


def _tag_all(f, choice):
    from prehist.syntax import children, rebuild
    kids = tuple(_tag_all(c, choice) for c in children(f))
    if isinstance(f, Box):
        return Box(kids[0], choice(f))
    return rebuild(f, kids) if kids else f


@given(modal_formulas.filter(lambda f: not any(type(g).__name__ == "Diamond" for _, g in positions(f))),
       st.lists(st.sampled_from(_SYMS), min_size=1, max_size=20), st.lists(terms, min_size=5, max_size=5))
def test_realization_inverts_projection(f, picks, ts):
    it = iter(picks * 50)
    af = _tag_all(f, lambda _: next(it))
    r = dict(zip(_SYMS, ts))
    g = apply_realization(r, af)
    assert not any(isinstance(h, Box) for _, h in positions(g))
    assert forgetful_formula(g) == af
