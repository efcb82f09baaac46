import random

import pytest

from prehist import corpus
from prehist.families import has_cycle, prehistoric_graph
from prehist.proofs import (
    AX, BOX_L, BOX_R, BOXCUT, IMP_R, Principal, ProofNode, Sequent, check_proof, iter_nodes, parse_sequent,
)
from prehist.prover import decide_g3s
from prehist.syntax import Box, parse
from prehist.transforms import (
    TransformError, contract, contract_formula, cut_free, double_box, eliminate_all, eliminate_boxcut, eliminate_cut,
    invert, project_proof, projection_edge_check, structural_report, weaken,
)


def prove(text):
    r = decide_g3s(parse_sequent(text))
    assert r.proof is not None, text
    return r.proof


def valid_for(p, seq, variant="g3s"):
    rep = check_proof(p, variant)
    assert rep.ok, rep.errors
    assert p.sequent.same_multiset(parse_sequent(seq) if isinstance(seq, str) else seq)


def n(rule, text, side=None, idx=None, *prems):
    return ProofNode(rule, parse_sequent(text), Principal(side, idx) if side else None, prems)


# --------------------------------------------------------------- structural

def test_weaken_example(g3s_example):
    out = weaken(g3s_example, parse("P"), "ant")
    valid_for(out, "P => ~[](P & ~[]P)")
    assert out.size == g3s_example.size


def test_contract_example():
    out = contract(n(AX, "P, P => P"), "ant", 0, 1)
    valid_for(out, "P => P")
    p = weaken(prove("P => P"), parse("P"), "ant")
    valid_for(contract_formula(p, parse("P"), "ant"), "P => P")


def test_invert_imp_right_round_trip():
    p = prove("=> [](P -> Q) -> ([]P -> []Q)")
    (q,) = invert(p, IMP_R, "suc", 0)
    valid_for(q, "[](P -> Q) => []P -> []Q")
    again = ProofNode(IMP_R, p.sequent, Principal("suc", 0), (q,))
    assert check_proof(again, "g3s").ok


def test_invert_not_invertible():
    with pytest.raises(TransformError):
        invert(prove("[]P => []P"), BOX_R, "suc", 0)


@pytest.fixture(scope="module")
def proofs():
    return corpus.cut_free_corpus(120, seed=7, gen=corpus.random_full)


def test_structural_reports_on_corpus(proofs):
    rng = random.Random(4)
    for p in proofs:
        s = p.sequent
        f = corpus.random_full(rng, 2)
        rep = structural_report(p, lambda q: weaken(q, f, rng.choice(("ant", "suc"))))
        assert rep.ok and check_proof(rep.output, "g3s").ok
        if s.ant:
            g = s.ant[0]
            dup = weaken(p, g, "ant")
            rep = structural_report(dup, lambda q: contract_formula(q, g, "ant"))
            assert rep.ok and rep.output.sequent.same_multiset(s)
            assert check_proof(rep.output, "g3s").ok
        for side in ("ant", "suc"):
            for i, g in enumerate(s.side(side)):
                rule = _invertible_rule(g, side)
                if rule is None:
                    continue
                for q in invert(p, rule, side, i):
                    assert check_proof(q, "g3s").ok
                    if not has_cycle(prehistoric_graph(p, "all-box")):
                        assert not has_cycle(prehistoric_graph(q, "all-box"))


def _invertible_rule(g, side):
    from prehist.proofs import AND_L, AND_R, IMP_L, NOT_L, NOT_R, OR_L, OR_R
    from prehist.syntax import And, Implies, Not, Or
    table = {("ant", Not): NOT_L, ("suc", Not): NOT_R, ("ant", And): AND_L, ("suc", And): AND_R,
             ("ant", Or): OR_L, ("suc", Or): OR_R, ("ant", Implies): IMP_L, ("suc", Implies): IMP_R}
    return table.get((side, type(g)))


# ---------------------------------------------------------------- Cut

def test_cut_axiom_case():
    rep = eliminate_cut(n(AX, "P => P, P"), n(AX, "P, P => P"))
    assert rep.ok
    assert rep.output.rule == AX
    valid_for(rep.output, "P => P")


def test_cut_box_key_case():
    # cut on □P between a ⊃□ principal and a proof that uses □P as a side formula of ⊃□
    left = weaken(prove("[]P => []P"), parse("[][]P"), "suc")
    right = prove("[]P, []P => [][]P")
    rep = eliminate_cut(left, right, parse("[]P"))
    assert rep.ok
    valid_for(rep.output, "[]P => [][]P")
    assert all(q.rule not in ("Cut", BOXCUT) for _, q in iter_nodes(rep.output))


def test_cut_mismatched_endsequents():
    with pytest.raises(TransformError):
        eliminate_cut(n(AX, "P => P"), n(AX, "Q => Q"))


def test_cut_corpus_small():
    for inst in corpus.cut_corpus(80, seed=9):
        rep = eliminate_cut(inst.left, inst.right, inst.cut)
        assert check_proof(rep.output, "g3s").ok
        assert rep.output.sequent.same_multiset(inst.proof.sequent)
        assert rep.ok, rep.violations
        for h, j, ks in rep.new_edges:
            assert ks
        if not rep.input_cyclic:
            assert not rep.output_cyclic


# --------------------------------------------------------------- □Cut

def test_boxcut_weakened_box_a():
    base = prove("[]P => []P")
    left = weaken(base, parse("[]Q"), "suc")
    right = prove("[]P => [](Q -> P), []P")
    rep = eliminate_boxcut(left, right, parse("Q"))
    assert rep.ok
    valid_for(rep.output, "[]P => []P")
    assert rep.output.size == base.size


def test_boxcut_degenerate():
    left = prove("[]P => []P, []P")
    right = prove("[]P => [](P -> P), []P")
    rep = eliminate_boxcut(left, right, parse("P"))
    valid_for(rep.output, "[]P => []P")


def test_boxcut_on_projection_fixture(g3lp_projection):
    node = next(q for _, q in iter_nodes(g3lp_projection) if q.rule == BOXCUT)
    rep = eliminate_all(node)
    valid_for(rep.output, "P, [](P & ~[]P) => []P")
    g = prehistoric_graph(rep.output, "all-box")
    # the box of the antecedent is prehistoric to □P; the cycle itself closes only in the whole proof
    assert any(g.vertices[h].kind == "n" and g.families[j].kind == "p" and lab == "L" for h, j, lab in g.edges)


def test_eliminate_all_projection(g3lp_projection):
    rep = eliminate_all(g3lp_projection)
    valid_for(rep.output, "=> ~[](P & ~[]P)")
    assert rep.input_cyclic and rep.output_cyclic


# ------------------------------------------------------------ □-doubling

def test_double_box_stacks():
    p = n(BOX_R, "[]P => []P", "suc", 0, n(BOX_L, "[]P => P", "ant", 0, n(AX, "P, []P => P")))
    out = double_box(p, 0)
    valid_for(out, "[]P => [][]P")
    assert [q.rule for _, q in iter_nodes(out)][:2] == [BOX_R, BOX_R]


def test_double_box_weakened():
    p = weaken(prove("P => P"), parse("[]Q"), "suc")
    out = double_box(p, 0)
    valid_for(out, "P => [][]Q, P")
    assert out.size == p.size


def test_double_box_corpus(proofs):
    seen = 0
    for p in proofs:
        for i, f in enumerate(p.sequent.suc):
            if isinstance(f, Box):
                rep = structural_report(p, lambda q: double_box(q, i))
                target = Sequent(p.sequent.ant, p.sequent.suc[:i] + (Box(f),) + p.sequent.suc[i + 1:])
                valid_for(rep.output, target)
                seen += 1
    assert seen > 5


def test_double_box_rejects_non_box():
    with pytest.raises(TransformError):
        double_box(prove("P => P"), 0)


# ---------------------------------------------------------- projection

def test_projection_of_example(g3lp_example):
    proj = project_proof(g3lp_example)
    assert check_proof(proj.proof, "g3s+boxcut").ok
    assert proj.proof.sequent == parse_sequent("=> ~[](P & ~[]P)")
    cuts = [q for _, q in iter_nodes(proj.proof) if q.rule == BOXCUT]
    assert len(cuts) == 1
    assert Box(cuts[0].principal.cut) == parse("[](P & ~[]P -> P)") or cuts[0].principal.cut == parse("P & ~[]P")
    assert proj.single_valued
    assert projection_edge_check(g3lp_example, proj) == []


def test_projection_single_constant():
    from prehist.proofs import CONST_R
    p = ProofNode(CONST_R, parse_sequent("=> c:(P -> P)"), Principal("suc", 0),
                  (prove("=> P -> P"),))
    proj = project_proof(p)
    assert proj.proof.rule == BOX_R and proj.proof.size == p.size
    assert proj.proof.sequent == parse_sequent("=> [](P -> P)")


def test_cut_free_is_identity_without_cuts(g3s_example):
    assert cut_free(g3s_example) is g3s_example
