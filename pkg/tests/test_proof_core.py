import pytest

from prehist import corpus
from prehist.proofs import (
    AX, BOX_R, BOXCUT, CUT, ProofNode, Sequent, SubformulaViolation, build_correspondence, check_proof,
    iter_nodes, node_at, parse_sequent, proof_from_json, proof_to_json, same_proof, symbol_occurrences, trace_to_root,
)
from prehist.syntax import parse


def ax(text):
    return ProofNode(AX, parse_sequent(text))


def test_fixtures_validate(g3s_example, g3lp_example, g3lp_projection):
    assert check_proof(g3s_example, "g3s").ok
    assert check_proof(g3lp_example, "g3lp", axiom_mode="tautology").ok
    assert check_proof(g3lp_projection, "g3s+boxcut").ok


def test_axiom_shape():
    assert check_proof(ax("P => P"), "g3s").ok
    rep = check_proof(ax("=> P"), "g3s")
    assert not rep.ok and rep.errors


def test_rule_outside_variant_rejected(g3lp_projection):
    assert not check_proof(g3lp_projection, "g3s").ok


def test_json_round_trip(g3s_example, g3lp_example):
    for p in (g3s_example, g3lp_example):
        assert same_proof(proof_from_json(proof_to_json(p)), p)


def test_malformed_json_rejected():
    with pytest.raises(ValueError):
        proof_from_json({"rule": "Ax"})


def test_correspondence_classes(g3s_example, g3lp_projection):
    assert len(build_correspondence(g3s_example)) == 2
    assert len(build_correspondence(g3lp_projection)) == 3
    assert len(build_correspondence(ax("P => P"))) == 0


def test_trace_to_root_example(g3s_example):
    corr = build_correspondence(g3s_example)
    # premise of the ⊃□ rule is □(P∧¬□P) ⊃ P; its inner □P traces to the root's inner □P
    addr = next(a for a, n in iter_nodes(g3s_example) if n.rule == BOX_R) + (0,)
    prem = node_at(g3s_example, addr).sequent
    assert prem == Sequent((parse("[](P & ~[]P)"),), (parse("P"),))
    root = trace_to_root(g3s_example, (addr, "ant", 0, (0, 1, 0)), corr)
    assert root == ((), "suc", 0, (0, 0, 1, 0))
    for occ in symbol_occurrences(g3s_example):
        if occ[0] == ():
            assert trace_to_root(g3s_example, occ, corr) == occ


def test_rootless_cut_family(g3lp_projection):
    corr = build_correspondence(g3lp_projection)
    assert any(not corr.root_members(k) for k in range(len(corr)))
    with pytest.raises(SubformulaViolation):
        rootless = next(k for k in range(len(corr)) if not corr.root_members(k))
        trace_to_root(g3lp_projection, corr.members(rootless)[0], corr)


@pytest.fixture(scope="module")
def machine_proofs():
    return corpus.cut_free_corpus(200, seed=11)


def test_subformula_property_on_corpus(machine_proofs):
    assert len(machine_proofs) >= 150
    for p in machine_proofs:
        assert check_proof(p, "g3s").ok
        corr = build_correspondence(p)
        for k in range(len(corr)):
            assert len(corr.root_members(k)) == 1
        for occ in symbol_occurrences(p):
            trace_to_root(p, occ, corr)



def test_no_sibling_links_without_cut(machine_proofs):
    # two occurrences in sibling subtrees share a class only via a common ancestor occurrence
    for p in machine_proofs[:60]:
        corr = build_correspondence(p)
        for members in corr.classes:
            addrs = {o[0] for o in members}
            for a in addrs:
                for b in addrs:
                    common = a[:min(len(a), len(b))]
                    n = 0
                    while n < len(common) and a[n] == b[n]:
                        n += 1
                    assert a[:n] in addrs


def test_cut_rules_need_variant():
    left = ax("P => P")
    node = ProofNode(CUT, parse_sequent("P => P"), None, (ax("P => P, P"), ax("P, P => P")))
    assert not check_proof(node, "g3s").ok
    assert BOXCUT not in {n.rule for _, n in iter_nodes(left)}
