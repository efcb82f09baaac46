"""Families, annotations, prehistoric graphs and cycle detection."""

from __future__ import annotations

from dataclasses import dataclass, field

from .proofs import (
    BOX_R, CONST_R, TERM_R, Correspondence, ProofNode, RuleError, Sequent, ValidationReport,
    build_correspondence, check_proof, infer_variant, iter_nodes, node_at,
)
from .syntax import (
    Box, Diamond, Formula, Polarity, Proof, children, polarity_map, positions, rebuild, render_term,
    subterms,
)

KIND_ORDER = {"p": 0, "o": 1, "n": 2, "u": 3, "t": 4}


class PolarityClash(RuleError):
    pass


class VariantError(RuleError):
    pass


@dataclass(frozen=True)
class Family:
    """One correspondence class with its classification.

    ``kind`` is ``p`` (principal positive), ``o`` (non-principal positive),
    ``n`` (negative), ``u`` (mixed polarity, only under cuts) or ``t``
    (a term family of an LP proof).  ``number`` counts within the kind.
    """

    cls: int
    kind: str
    number: int
    top: object = None

    @property
    def name(self) -> str:
        return f"{'f' if self.kind == 'u' else self.kind}{self.number}"

    @property
    def label(self) -> tuple:
        return (self.kind, self.number)


def _occ_polarity(p: ProofNode, occ, cache: dict) -> Polarity:
    addr, side, i, path = occ
    if addr not in cache:
        cache[addr] = polarity_map(node_at(p, addr).sequent)
    return cache[addr][(side, i, path)]


def _principal_classes(p: ProofNode, corr: Correspondence, rules=(BOX_R,)) -> set:
    out = set()
    for addr, n in iter_nodes(p):
        if n.rule in rules:
            out.add(corr.class_of[(addr, n.principal.side, n.principal.index, ())])
    return out


def classify(corr: Correspondence, strict: bool = False) -> list:
    """Classify every class of a modal proof; ``strict`` raises on mixed polarity."""
    p = corr.proof
    principal = _principal_classes(p, corr)
    cache: dict = {}
    counters = {k: 0 for k in KIND_ORDER}
    out = []
    for k, members in enumerate(corr.classes):
        pols = {_occ_polarity(p, o, cache) for o in members}
        if len(pols) > 1:
            if strict:
                raise PolarityClash(f"family {k} mixes polarities (first occurrence {members[0]})")
            kind = "u"
        elif pols == {Polarity.NEGATIVE}:
            kind = "n"
        else:
            kind = "p" if k in principal else "o"
        out.append(Family(k, kind, counters[kind]))
        counters[kind] += 1
    return out


def _top_term(terms: set):
    best = None
    for t in sorted(terms, key=lambda t: (len(render_term(t)), render_term(t))):
        if all(s in subterms(t) for s in terms):
            return t
        best = t
    return best


def classify_terms(corr: Correspondence) -> list:
    out = []
    for k, members in enumerate(corr.classes):
        terms = {corr.formula_at(o).term for o in members}
        out.append(Family(k, "t", k, _top_term(terms)))
    return out


# ------------------------------------------------------------ annotation

@dataclass
class AnnotatedProof:
    proof: ProofNode
    corr: Correspondence
    families: list
    report: ValidationReport | None = None

    def family_of(self, occ) -> Family:
        return self.families[self.corr.class_of[occ]]

    def by_name(self, name: str) -> Family:
        for f in self.families:
            if f.name == name:
                return f
        raise KeyError(f"unknown family {name!r}")

    def annotate_formula(self, addr: tuple, side: str, i: int) -> Formula:
        f = node_at(self.proof, addr).sequent.side(side)[i]

        def go(g, path):
            kids = tuple(go(c, path + (n,)) for n, c in enumerate(children(g)))
            if isinstance(g, Box):
                return Box(kids[0], self.family_of((addr, side, i, path)).label)
            return rebuild(g, kids) if kids else g
        return go(f, ())

    def annotated_sequent(self, addr: tuple = ()) -> Sequent:
        s = node_at(self.proof, addr).sequent
        return Sequent(tuple(self.annotate_formula(addr, "ant", i) for i in range(len(s.ant))),
                       tuple(self.annotate_formula(addr, "suc", i) for i in range(len(s.suc))))

    def annotated_proof(self) -> ProofNode:
        def go(addr, n):
            return ProofNode(n.rule, self.annotated_sequent(addr), n.principal,
                             tuple(go(addr + (k,), q) for k, q in enumerate(n.premises)))
        return go((), self.proof)

    def principal_families(self) -> list:
        return [f for f in self.families if f.kind == "p"]


def _require_cut_free_modal(p: ProofNode, report: ValidationReport | None) -> ValidationReport:
    if report is None:
        variant = infer_variant(p)
        if variant != "g3s":
            raise VariantError(f"annotation needs a cut-free G3s proof, got {variant}")
        report = check_proof(p, "g3s")
    if report.variant not in ("g3s", "g3s-min"):
        raise VariantError(f"annotation needs a cut-free G3s proof, got {report.variant}")
    report.raise_if_invalid()
    for _, n in iter_nodes(p):
        for _, _, f in n.sequent.formulas():
            if any(isinstance(g, Diamond) for _, g in positions(f)):
                raise VariantError("annotation is not defined for proofs containing ◇")
    return report


def classify_and_annotate(p: ProofNode, report: ValidationReport | None = None) -> AnnotatedProof:
    report = _require_cut_free_modal(p, report)
    corr = build_correspondence(p, report)
    return AnnotatedProof(p, corr, classify(corr, strict=True), report)


# ---------------------------------------------------------------- graphs

@dataclass
class PrehistoricGraph:
    mode: str
    vertices: list  # Family, ordered by class index
    edges: frozenset  # (h, i, label) over class indices
    families: list = field(default_factory=list)

    def vertex_ids(self) -> list:
        return [v.cls for v in self.vertices]

    def name(self, k: int) -> str:
        return self.families[k].name

    def has_edge(self, h: int, i: int, label: str | None = None) -> bool:
        return any(e[0] == h and e[1] == i and (label is None or e[2] == label) for e in self.edges)

    def named_edges(self) -> set:
        return {(self.name(h), self.name(i), lab) for h, i, lab in self.edges}

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            d = {"id": v.name, "kind": v.kind, "class": v.cls}
            if v.top is not None:
                d["term"] = render_term(v.top)
            verts.append(d)
        edges = [{"from": self.name(h), "to": self.name(i), "label": lab}
                 for h, i, lab in sorted(self.edges)]
        return {"mode": self.mode, "vertices": verts, "edges": edges}

    def to_dot(self) -> str:
        lines = ["digraph prehistoric {"]
        for v in self.vertices:
            lines.append(f'  "{v.name}";')
        for h, i, lab in sorted(self.edges):
            lines.append(f'  "{self.name(h)}" -> "{self.name(i)}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


MODES = ("g3s-principal", "all-box", "lp-term")


def prehistoric_graph(p, mode: str = "g3s-principal") -> PrehistoricGraph:
    """Build the prehistoric graph of a proof (or of an :class:`AnnotatedProof`).

    Edges come from the premises of (⊃□) rules, or of (⊃:) rules in
    ``lp-term`` mode; the label records the side of the premise occurrence.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "g3s-principal":
        ann = p if isinstance(p, AnnotatedProof) else classify_and_annotate(p)
        proof, corr, fams = ann.proof, ann.corr, ann.families
        rules = (BOX_R,)
        keep = {f.cls for f in fams if f.kind == "p"}
    else:
        proof = p.proof if isinstance(p, AnnotatedProof) else p
        variant = infer_variant(proof)
        if mode == "lp-term" and variant != "g3lp":
            raise VariantError("lp-term mode needs a G3lp proof")
        if mode == "all-box" and variant == "g3lp":
            raise VariantError("all-box mode needs a modal proof")
        report = check_proof(proof, variant)
        corr = build_correspondence(proof, report)
        if mode == "lp-term":
            fams, rules = classify_terms(corr), (CONST_R, TERM_R)
        else:
            fams, rules = classify(corr), (BOX_R,)
        keep = {f.cls for f in fams}
    edges = set()
    for addr, n in iter_nodes(proof):
        if n.rule not in rules:
            continue
        j = corr.class_of[(addr, "suc", n.principal.index, ())]
        prem = addr + (0,)
        for side, i, f in node_at(proof, prem).sequent.formulas():
            for path, g in positions(f):
                if isinstance(g, (Box, Proof)):
                    h = corr.class_of[(prem, side, i, path)]
                    if h in keep and j in keep:
                        edges.add((h, j, "L" if side == "ant" else "R"))
    verts = [f for f in fams if f.cls in keep]
    return PrehistoricGraph(mode, verts, frozenset(edges), fams)


def find_cycle(g: PrehistoricGraph, left_only: bool = False):
    """Shortest cycle, canonically rotated to start at its smallest vertex."""
    adj: dict = {}
    for h, i, lab in g.edges:
        if left_only and lab != "L":
            continue
        adj.setdefault(h, set()).add(i)
    best = None
    for s in sorted(adj):
        if best is not None and len(best) == 1:
            break
        found = None
        layer = {s: (s,)}
        seen = {s}
        while layer and found is None:
            nxt: dict = {}
            for v in sorted(layer, key=lambda v: layer[v]):
                path = layer[v]
                for w in sorted(adj.get(v, ())):
                    if w == s:
                        if found is None or path < found:
                            found = path
                    elif w > s and w not in seen:
                        cand = path + (w,)
                        if w not in nxt or cand < nxt[w]:
                            nxt[w] = cand
            seen |= set(nxt)
            layer = nxt
        if found is not None and (best is None or (len(found), found) < (len(best), best)):
            best = found
    if best is None:
        return None
    return [g.families[k] for k in best]


def has_cycle(g: PrehistoricGraph, left_only: bool = False) -> bool:
    return find_cycle(g, left_only) is not None


def leaf_paths(p: ProofNode):
    """Root-to-leaf paths as tuples of node addresses."""
    def go(addr, n, acc):
        acc = acc + (addr,)
        if not n.premises:
            yield acc
        for k, q in enumerate(n.premises):
            yield from go(addr + (k,), q, acc)
    yield from go((), p, ())


def prehistory_witness(ann: AnnotatedProof, h, i) -> list:
    """Occurrences of family ``h`` inside a pre-history of family ``i``.

    Returns ``(leaf address, node address, occurrence)`` triples: for every
    root-leaf path, every occurrence of ``h`` at or above the premise of a
    (⊃□) rule on that path that introduces ``i``.
    """
    h = ann.by_name(h) if isinstance(h, str) else h
    i = ann.by_name(i) if isinstance(i, str) else i
    for fam in (h, i):
        if fam not in ann.families:
            raise KeyError(f"unknown family {fam}")
    p, corr = ann.proof, ann.corr
    out = []
    for path in leaf_paths(p):
        for n_pos, addr in enumerate(path[:-1]):
            node = node_at(p, addr)
            if node.rule != BOX_R:
                continue
            if corr.class_of[(addr, "suc", node.principal.index, ())] != i.cls:
                continue
            for above in path[n_pos + 1:]:
                for side, k, f in node_at(p, above).sequent.formulas():
                    for fp, g in positions(f):
                        if isinstance(g, Box) and corr.class_of[(above, side, k, fp)] == h.cls:
                            out.append((path[-1], above, (above, side, k, fp)))
    return out
