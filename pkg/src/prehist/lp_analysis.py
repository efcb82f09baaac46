"""Hilbert-style LP checking, inputs, self-referentiality and realizations."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field

from . import axioms
from .families import find_cycle, prehistoric_graph
from .proofs import CONST_R, TERM_R, ProofNode, RuleError, build_correspondence, check_proof, iter_nodes
from .syntax import (
    Box, Const, Formula, Implies, ParseError, Proof, Var, children, parse, parse_term, rebuild, render,
    render_term, subterms,
)

NON_SELF_REFERENTIAL = "NonSelfReferential"
CYCLIC = "Cyclic"
DIRECT = "Direct"


# --------------------------------------------------------- Hilbert system

@dataclass(frozen=True)
class Step:
    """One line of a derivation.

    ``rule`` is ``axiom``, ``assumption``, ``mp`` (``refs = (i, j)`` with step
    ``i`` proving ``F → G`` and step ``j`` proving ``F``) or ``nec``
    (``refs = (i,)`` an axiom step, or empty to check the body directly).
    """

    formula: Formula
    rule: str
    refs: tuple = ()


@dataclass
class HilbertResult:
    accepted: bool
    cs: frozenset
    errors: list = field(default_factory=list)  # (step index, message)

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "cs": sorted(render(f) for f in self.cs),
                "errors": [{"step": i, "message": m} for i, m in self.errors]}


def check_hilbert(steps, assumptions=(), axiom_mode: str = "tautology") -> HilbertResult:
    """Check every step; returns the constant specification produced by necessitation."""
    assumptions = set(assumptions)
    errors, cs = [], set()
    rules = {}
    for n, st in enumerate(steps):
        f = st.formula

        def bad(msg):
            errors.append((n, msg))

        def ref(i):
            if not isinstance(i, int) or not 0 <= i < n:
                bad(f"reference {i} does not point to an earlier step")
                return None
            return steps[i]

        if st.rule == "axiom":
            if not axioms.is_lp_axiom(f, axiom_mode):
                bad(f"{render(f)} is not an axiom instance")
        elif st.rule == "assumption":
            if f not in assumptions:
                bad(f"{render(f)} is not among the assumptions")
        elif st.rule == "mp":
            if len(st.refs) != 2:
                bad("modus ponens needs two references")
            else:
                a, b = ref(st.refs[0]), ref(st.refs[1])
                if a is not None and b is not None:
                    imp = a.formula
                    if not (isinstance(imp, Implies) and imp.left == b.formula and imp.right == f):
                        bad("modus ponens premises do not match F → G, F ⊢ G")
        elif st.rule == "nec":
            if not (isinstance(f, Proof) and isinstance(f.term, Const)):
                bad("necessitation must conclude c:A with c a constant")
            elif st.refs:
                src = ref(st.refs[0])
                if src is not None:
                    if rules.get(st.refs[0]) != "axiom" or src.formula != f.body:
                        bad("necessitation must cite an axiom step proving the body")
                    else:
                        cs.add(f)
            elif not axioms.is_lp_axiom(f.body, axiom_mode):
                bad(f"{render(f.body)} is not an axiom instance")
            else:
                cs.add(f)
        else:
            bad(f"unknown rule {st.rule!r}")
        rules[n] = st.rule
    return HilbertResult(not errors, frozenset(cs), errors)


def load_hilbert(d) -> tuple:
    """Steps and assumptions from JSON ``{"steps": [...], "assumptions": [...]}``."""
    if isinstance(d, str):
        d = json.loads(d)
    steps = []
    for s in d["steps"]:
        steps.append(Step(parse(s["formula"], "lp"), s["rule"], tuple(s.get("refs", ()))))
    assumptions = [parse(a, "lp") for a in d.get("assumptions", ())]
    return steps, assumptions


# ------------------------------------------------- CS and inputs

class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ConstantSpecification:
    formulas: frozenset

    def __post_init__(self):
        for f in self.formulas:
            if not (isinstance(f, Proof) and isinstance(f.term, Const) and axioms.is_lp_axiom(f.body)):
                raise ShapeError(f"{render(f)} is not of the form c:A with A an axiom")

    def is_injective(self) -> bool:
        seen: dict = {}
        for f in self.formulas:
            if seen.setdefault(f.term, f.body) != f.body:
                return False
        return True

    def sorted(self) -> list:
        return sorted(self.formulas, key=render)


@dataclass(frozen=True)
class InputSet:
    """Principal formulas of the (⊃:) rules of a proof, with their source rule."""

    items: tuple  # ((formula, source), ...) sorted, source in {"t", "c"}

    @property
    def formulas(self) -> list:
        return list(dict.fromkeys(f for f, _ in self.items))

    @property
    def cs(self) -> ConstantSpecification:
        return ConstantSpecification(frozenset(f for f, src in self.items if src == "c"))

    def to_json(self) -> dict:
        return {"inputs": [{"formula": render(f), "source": src} for f, src in self.items],
                "cs": [render(f) for f in self.cs.sorted()]}


def inputs_of(p: ProofNode) -> InputSet:
    items = set()
    for _, n in iter_nodes(p):
        if n.rule in (CONST_R, TERM_R):
            items.add((n.sequent.suc[n.principal.index], "c" if n.rule == CONST_R else "t"))
    return InputSet(tuple(sorted(items, key=lambda x: (render(x[0]), x[1]))))


# ----------------------------------------------- self-referentiality

@dataclass(frozen=True)
class SelfRefVerdict:
    kind: str
    witness: tuple = ()

    @property
    def self_referential(self) -> bool:
        return self.kind != NON_SELF_REFERENTIAL

    def to_json(self) -> dict:
        return {"verdict": self.kind, "witness": [render(f) for f in self.witness]}


def _elements(s) -> list:
    if isinstance(s, InputSet):
        s = s.formulas
    elif isinstance(s, ConstantSpecification):
        s = s.formulas
    out = list(dict.fromkeys(s))
    for f in out:
        if not isinstance(f, Proof):
            raise ShapeError(f"{render(f)} is not of the form t:A")
    return sorted(out, key=render)


def refers_to(a: Proof, b: Proof) -> bool:
    """Edge ``a → b``: the term of ``b`` occurs as a subterm inside the body of ``a``."""
    return b.term in subterms(a.body)


def classify_selfref(s) -> SelfRefVerdict:
    """Shortest self-referential cycle among the elements, with a deterministic witness."""
    elems = _elements(s)
    n = len(elems)
    adj = [[j for j in range(n) if refers_to(elems[i], elems[j])] for i in range(n)]
    for i in range(n):
        if i in adj[i]:
            return SelfRefVerdict(DIRECT, (elems[i],))
    best = None
    for start in range(n):
        # BFS for the shortest cycle through start, using only vertices >= start
        prev = {start: None}
        q = deque([start])
        found = None
        while q and found is None:
            v = q.popleft()
            for w in adj[v]:
                if w == start:
                    found = v
                    break
                if w > start and w not in prev:
                    prev[w] = v
                    q.append(w)
        if found is not None:
            path = [found]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            cyc = tuple(reversed(path))
            if best is None or len(cyc) < len(best):
                best = cyc
    if best is None:
        return SelfRefVerdict(NON_SELF_REFERENTIAL)
    return SelfRefVerdict(CYCLIC, tuple(elems[i] for i in best))


def is_not_directly_self_referential(s) -> bool:
    """Membership in the class written CS* (no element t:A(t))."""
    return all(not refers_to(f, f) for f in _elements(s))


def is_not_self_referential(s) -> bool:
    """Membership in the class written CS^⊙ (no self-referential subset)."""
    return not classify_selfref(s).self_referential


def verify_witness(v: SelfRefVerdict) -> bool:
    w = v.witness
    if v.kind == NON_SELF_REFERENTIAL:
        return not w
    if v.kind == DIRECT and len(w) != 1:
        return False
    return all(refers_to(w[k], w[(k + 1) % len(w)]) for k in range(len(w)))


# --------------------------------------------------- chain extraction

class CycleAbsent(RuleError):
    pass


def extract_selfref_chain(p: ProofNode, cycle) -> SelfRefVerdict:
    """Self-referential subset of the inputs, witnessing a term-family cycle of ``p``.

    ``cycle`` lists families, class indices or family names of the ``lp-term`` graph.
    """
    g = prehistoric_graph(p, "lp-term")
    names = {f.name: f.cls for f in g.families}
    cyc = [c.cls if hasattr(c, "cls") else names.get(c, c) if isinstance(c, str) else c for c in cycle]
    if not cyc or any(not isinstance(c, int) for c in cyc):
        raise CycleAbsent("cycle not present: unknown families")
    for k, h in enumerate(cyc):
        if not g.has_edge(h, cyc[(k + 1) % len(cyc)]):
            raise CycleAbsent("cycle not present in the proof's term-family graph")
    rep = check_proof(p, "g3lp")
    corr = build_correspondence(p, rep)
    on_cycle = set()
    for addr, n in iter_nodes(p):
        if n.rule in (CONST_R, TERM_R):
            if corr.class_of[(addr, "suc", n.principal.index, ())] in cyc:
                on_cycle.add(n.sequent.suc[n.principal.index])
    v = classify_selfref(on_cycle)
    if v.self_referential:
        return v
    v = classify_selfref(inputs_of(p))
    if v.self_referential:
        return v
    raise RuleError("cyclic term-family graph but no self-referential input subset")


def term_cycle(p: ProofNode):
    """Shortest cycle of the term-family graph, or ``None``."""
    return find_cycle(prehistoric_graph(p, "lp-term"))


# -------------------------------------------------------- realizations

_SYM = re.compile(r"^\s*([⊞⊡⊟+.\-pon])\s*_?(\d+)\s*$")
_KIND = {"⊞": "p", "+": "p", "p": "p", "⊡": "o", ".": "o", "o": "o", "⊟": "n", "-": "n", "n": "n"}


class RealizationError(KeyError):
    pass


def parse_symbol(text: str) -> tuple:
    m = _SYM.match(text)
    if not m:
        raise ParseError(f"bad annotation symbol {text!r}", 0, text)
    return _KIND[m.group(1)], int(m.group(2))


def symbol_name(sym: tuple, unicode: bool = True) -> str:
    kind, n = sym
    mark = {"p": "⊞", "o": "⊡", "n": "⊟"} if unicode else {"p": "+", "o": ".", "n": "-"}
    return f"{mark[kind]}{n}"


def realization(mapping: dict) -> dict:
    """Normalize ``{"⊟0": "x", ...}`` (or already parsed keys/terms) to ``{(kind, n): Term}``."""
    out = {}
    for k, v in mapping.items():
        key = parse_symbol(k) if isinstance(k, str) else tuple(k)
        out[key] = parse_term(v) if isinstance(v, str) else v
    return out


def symbols_of(af: Formula) -> list:
    seen = []

    def go(g):
        if isinstance(g, Box) and isinstance(g.tag, tuple) and g.tag not in seen:
            seen.append(g.tag)
        for c in children(g):
            go(c)
    go(af)
    return seen


def apply_realization(r: dict, af: Formula) -> Formula:
    """Replace each annotated box by ``t:`` with ``t`` the symbol's term."""
    def go(g):
        kids = tuple(go(c) for c in children(g))
        if isinstance(g, Box):
            if not isinstance(g.tag, tuple):
                raise RealizationError(f"unannotated box in {render(af)}")
            if g.tag not in r:
                raise RealizationError(f"no term for symbol {symbol_name(g.tag)}")
            return Proof(r[g.tag], kids[0])
        return rebuild(g, kids) if kids else g
    return go(af)


def check_normal(r: dict, cs=None, af: Formula | None = None) -> bool:
    """Negative and non-principal-positive symbols get pairwise distinct variables; CS injective."""
    syms = symbols_of(af) if af is not None else list(r)
    terms = [r[s] for s in syms if s[0] in ("n", "o")]
    if any(not isinstance(t, Var) for t in terms) or len(set(terms)) != len(terms):
        return False
    if cs is not None:
        spec = cs if isinstance(cs, ConstantSpecification) else ConstantSpecification(frozenset(cs))
        return spec.is_injective()
    return True


def realize_proof(ann, r: dict) -> ProofNode:
    """Apply ``r`` to every annotated sequent of an annotated G3s proof, keeping the rules."""
    from .proofs import Sequent

    def go(addr, n):
        s = ann.annotated_sequent(addr)
        seq = Sequent(tuple(apply_realization(r, f) for f in s.ant), tuple(apply_realization(r, f) for f in s.suc))
        return ProofNode(n.rule, seq, n.principal, tuple(go(addr + (k,), q) for k, q in enumerate(n.premises)))
    return go((), ann.proof)


def render_realization(r: dict) -> dict:
    return {symbol_name(k): render_term(v) for k, v in sorted(r.items())}


__all__ = [
    "CYCLIC", "DIRECT", "NON_SELF_REFERENTIAL", "ConstantSpecification", "CycleAbsent", "HilbertResult", "InputSet",
    "RealizationError", "SelfRefVerdict", "ShapeError", "Step", "apply_realization", "check_hilbert", "check_normal",
    "classify_selfref", "extract_selfref_chain", "inputs_of", "is_not_directly_self_referential",
    "is_not_self_referential", "load_hilbert", "parse_symbol", "realization", "realize_proof", "refers_to", "render_realization",
    "symbol_name", "symbols_of", "term_cycle", "verify_witness",
]
