import pytest

from prehist import corpus
from prehist.families import (
    classify_and_annotate, find_cycle, has_cycle, prehistoric_graph, prehistory_witness, PrehistoricGraph, Family,
    VariantError,
)
from prehist.proofs import (
    AX, BOX_L, BOX_R, IMP_R, Principal, ProofNode, check_proof, parse_sequent, render_sequent, same_proof,
)


def n(rule, text, side=None, idx=None, *prems):
    return ProofNode(rule, parse_sequent(text), Principal(side, idx) if side else None, prems)


def box_imp_box():
    """⊃ □P → □P in four nodes."""
    return n(IMP_R, "=> []P -> []P", "suc", 0,
             n(BOX_R, "[]P => []P", "suc", 0,
               n(BOX_L, "[]P => P", "ant", 0,
                 n(AX, "P, []P => P"))))


def test_four_node_proof_valid():
    assert check_proof(box_imp_box(), "g3s").ok


def test_example_families(g3s_example):
    ann = classify_and_annotate(g3s_example)
    assert [f.name for f in ann.families] == ["n0", "p0"]
    assert render_sequent(ann.annotated_sequent(), unicode=True, annotated=True) == "⊃ ¬⊟0(P ∧ ¬⊞0P)"


def test_small_proof_families():
    ann = classify_and_annotate(box_imp_box())
    assert sorted(f.name for f in ann.families) == ["n0", "p0"]
    ann2 = classify_and_annotate(n(IMP_R, "=> P -> P", "suc", 0, n(AX, "P => P")))
    assert ann2.families == []


def test_annotation_needs_cut_free(g3lp_projection):
    with pytest.raises(VariantError):
        classify_and_annotate(g3lp_projection)


def test_annotation_erases_to_source(g3s_example):
    ann = classify_and_annotate(g3s_example)
    erased = ann.annotated_proof()
    assert same_proof(erased, g3s_example)


def test_example_graph(g3s_example):
    g = prehistoric_graph(g3s_example, "g3s-principal")
    assert [v.name for v in g.vertices] == ["p0"]
    assert g.named_edges() == {("p0", "p0", "L")}
    assert [f.name for f in find_cycle(g)] == ["p0"]
    assert [f.name for f in find_cycle(g, left_only=True)] == ["p0"]


def test_projection_graph(g3lp_projection):
    g = prehistoric_graph(g3lp_projection, "all-box")
    e = g.named_edges()
    assert ("n0", "p0", "L") in e and ("p0", "p0", "L") in e


def test_small_graph_empty():
    assert prehistoric_graph(box_imp_box(), "g3s-principal").edges == frozenset()


def _graph(edges, k=2):
    fams = [Family(i, "p", i) for i in range(k)]
    return PrehistoricGraph("g3s-principal", fams, frozenset(edges), fams)


def test_find_cycle_label_filter():
    assert find_cycle(_graph([])) is None
    g = _graph([(0, 1, "R"), (1, 0, "L")])
    assert [f.cls for f in find_cycle(g)] == [0, 1]
    assert find_cycle(g, left_only=True) is None


def test_witness_examples(g3s_example):
    ann = classify_and_annotate(g3s_example)
    assert prehistory_witness(ann, "p0", "p0")
    small = classify_and_annotate(box_imp_box())
    assert prehistory_witness(small, "p0", "p0") == []
    assert prehistory_witness(small, "n0", "n0") == []


@pytest.fixture(scope="module")
def proofs():
    return corpus.cut_free_corpus(150, seed=5)


def test_witness_iff_edge(proofs):
    for p in proofs:
        ann = classify_and_annotate(p)
        g = prehistoric_graph(ann, "g3s-principal")
        prin = ann.principal_families()
        for h in prin:
            for i in prin:
                assert bool(prehistory_witness(ann, h, i)) == g.has_edge(h.cls, i.cls)


def test_cycle_iff_left_cycle(proofs):
    # not proved anywhere; a failure here is a finding, not a test bug
    for p in proofs:
        g = prehistoric_graph(p, "g3s-principal")
        assert has_cycle(g) == has_cycle(g, left_only=True), render_sequent(p.sequent)


def test_negative_families_have_no_prehistory(proofs):
    for p in proofs:
        ann = classify_and_annotate(p)
        g = prehistoric_graph(p, "all-box")
        kinds = {f.cls: f.kind for f in ann.families}
        for h, i, _ in g.edges:
            assert kinds[i] == "p"


def test_determinism(proofs):
    for p in proofs[:40]:
        a, b = prehistoric_graph(p, "all-box"), prehistoric_graph(p, "all-box")
        assert a.to_json() == b.to_json()
        assert [f.name for f in classify_and_annotate(p).families] == [f.name for f in classify_and_annotate(p).families]


def test_lp_term_graph(g3lp_example):
    g = prehistoric_graph(g3lp_example, "lp-term")
    assert has_cycle(g)
    with pytest.raises(VariantError):
        prehistoric_graph(g3lp_example, "all-box")


def test_annotated_json_round_trip(g3s_example):
    from prehist.proofs import proof_from_json, proof_to_json
    ann = classify_and_annotate(g3s_example)
    data = proof_to_json(ann.annotated_proof(), annotated=True)
    assert "⊟" in data["sequent"]["suc"][0] or "[-0]" in data["sequent"]["suc"][0]
    back = proof_from_json(data)
    assert same_proof(back, g3s_example)
    assert render_sequent(back.sequent, annotated=True) == render_sequent(ann.annotated_sequent(), annotated=True)
