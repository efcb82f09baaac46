"""Sequents, proof trees, rule schemas, validation and symbol correspondence.

Nodes are addressed by tuples of premise indices from the root, so the
lexicographic order of addresses is the preorder of the tree.  A symbol
occurrence is ``(address, side, index, path)`` and names either a box or a
justification term ``t:`` at ``path`` inside the ``index``-th formula on
``side`` of the node's sequent.

Multisets of equal formulas are matched deterministically: active formulas
of a premise claim the earliest equal antecedent members and the latest
equal succedent members; the remaining members are paired with the
conclusion context in order, preferring members whose box tags agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from . import axioms
from .syntax import (
    And, App, Atom, Bang, Bottom, Box, Const, Diamond, Formula, Implies, Not, Or, Proof, Sum,
    _Parser, is_lp, is_minimal, is_modal, parse, parse_formula_list,
    positions, render, subformula_at, tag_signature, DEFAULT_CONST_PREFIXES,
)

# ------------------------------------------------------------- rule tags

AX, BOT_L = "Ax", "⊥⊃"
NOT_L, NOT_R, AND_L, AND_R, OR_L, OR_R, IMP_L, IMP_R = "¬⊃", "⊃¬", "∧⊃", "⊃∧", "∨⊃", "⊃∨", "→⊃", "⊃→"
BOX_L, BOX_R, DIA_L, DIA_R = "□⊃", "⊃□", "◇⊃", "⊃◇"
CUT, BOXCUT = "Cut", "□Cut"
PROOF_L, CONST_R, TERM_R, BANG_R, SUM_R, APP_R = ":⊃", "⊃:c", "⊃:t", "⊃!", "⊃+", "⊃·"

RULE_ALIASES = {
    "Ax": AX, "bot=>": BOT_L, "~=>": NOT_L, "=>~": NOT_R, "&=>": AND_L, "=>&": AND_R,
    "|=>": OR_L, "=>|": OR_R, "->=>": IMP_L, "=>->": IMP_R, "[]=>": BOX_L, "=>[]": BOX_R,
    "<>=>": DIA_L, "=><>": DIA_R, "Cut": CUT, "[]Cut": BOXCUT, ":=>": PROOF_L,
    "=>:c": CONST_R, "=>:t": TERM_R, "=>!": BANG_R, "=>+": SUM_R, "=>*": APP_R,
}
ALL_RULES = (AX, BOT_L, NOT_L, NOT_R, AND_L, AND_R, OR_L, OR_R, IMP_L, IMP_R, BOX_L, BOX_R,
             DIA_L, DIA_R, CUT, BOXCUT, PROOF_L, CONST_R, TERM_R, BANG_R, SUM_R, APP_R)
for _r in ALL_RULES:
    RULE_ALIASES.setdefault(_r, _r)

_CLASSICAL_MIN = {AX, BOT_L, IMP_L, IMP_R}
_CLASSICAL = _CLASSICAL_MIN | {NOT_L, NOT_R, AND_L, AND_R, OR_L, OR_R}
_S4_FULL = _CLASSICAL | {BOX_L, BOX_R, DIA_L, DIA_R}
VARIANTS = {
    "g3s-min": _CLASSICAL_MIN | {BOX_L, BOX_R},
    "g3s": _S4_FULL,
    "g3s+cut": _S4_FULL | {CUT},
    "g3s+boxcut": _S4_FULL | {BOXCUT},
    "g3s+cuts": _S4_FULL | {CUT, BOXCUT},
    "g3lp": _CLASSICAL | {PROOF_L, CONST_R, TERM_R, BANG_R, SUM_R, APP_R},
}
VARIANT_ALIASES = {"G3s-min": "g3s-min", "G3s-full": "g3s", "g3s-full": "g3s", "G3s+Cut": "g3s+cut",
                   "G3s+BoxCut": "g3s+boxcut", "G3lp": "g3lp"}

# rules whose conclusion may carry weakening formulas
WEAKENING_RULES = {AX, BOT_L, BOX_R, DIA_L, CONST_R, TERM_R}


def canonical_rule(tag: str) -> str:
    try:
        return RULE_ALIASES[tag]
    except KeyError:
        raise ValueError(f"unknown rule tag {tag!r}") from None


def canonical_variant(v: str) -> str:
    v = VARIANT_ALIASES.get(v, v)
    if v not in VARIANTS:
        raise ValueError(f"unknown calculus variant {v!r}")
    return v


# ------------------------------------------------------------ structures

@dataclass(frozen=True)
class Sequent:
    ant: tuple = ()
    suc: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ant", tuple(self.ant))
        object.__setattr__(self, "suc", tuple(self.suc))

    def side(self, s: str) -> tuple:
        return self.ant if s == "ant" else self.suc

    def formulas(self) -> Iterator[tuple]:
        for i, f in enumerate(self.ant):
            yield "ant", i, f
        for i, f in enumerate(self.suc):
            yield "suc", i, f

    def same_multiset(self, other: "Sequent") -> bool:
        return _msort(self.ant) == _msort(other.ant) and _msort(self.suc) == _msort(other.suc)

    def __str__(self) -> str:
        return render_sequent(self)


def _msort(forms) -> list:
    return sorted(render(f) for f in forms)


@dataclass(frozen=True)
class Principal:
    side: str | None = None
    index: int | None = None
    cut: Formula | None = None


@dataclass(frozen=True, eq=False)
class ProofNode:
    rule: str
    sequent: Sequent
    principal: Principal | None = None
    premises: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    def principal_formula(self) -> Formula | None:
        p = self.principal
        if p is None or p.side is None:
            return None
        return self.sequent.side(p.side)[p.index]

    @property
    def height(self) -> int:
        return 1 + max((q.height for q in self.premises), default=0)

    @property
    def size(self) -> int:
        return 1 + sum(q.size for q in self.premises)


def iter_nodes(p: ProofNode, addr: tuple = ()) -> Iterator[tuple]:
    """Preorder ``(address, node)`` pairs."""
    stack = [(addr, p)]
    while stack:
        a, n = stack.pop()
        yield a, n
        for k in range(len(n.premises) - 1, -1, -1):
            stack.append((a + (k,), n.premises[k]))


def node_at(p: ProofNode, addr: tuple) -> ProofNode:
    for k in addr:
        p = p.premises[k]
    return p


def rules_used(p: ProofNode) -> set:
    return {n.rule for _, n in iter_nodes(p)}


def same_proof(a: ProofNode, b: ProofNode) -> bool:
    return proof_to_json(a) == proof_to_json(b)


# ------------------------------------------------------------ text forms

def render_sequent(s: Sequent, unicode: bool = False, annotated: bool = False) -> str:
    arrow = "⊃" if unicode else "=>"
    left = ", ".join(render(f, unicode, annotated) for f in s.ant)
    right = ", ".join(render(f, unicode, annotated) for f in s.suc)
    return f"{left} {arrow} {right}".strip() if (left or right) else arrow


def parse_sequent(text: str, language: str = "any", const_prefixes=DEFAULT_CONST_PREFIXES) -> Sequent:
    """``A, B => C`` (``⊃`` accepted).  Without an arrow the text is one succedent formula."""
    p = _Parser(text, language, const_prefixes)
    ant = parse_formula_list(p)
    if p.is_op("=>"):
        p.i += 1
        suc = parse_formula_list(p)
    else:
        if len(ant) != 1:
            p.fail("expected '=>'")
        ant, suc = [], ant
    p.done()
    return Sequent(tuple(ant), tuple(suc))


# --------------------------------------------------------- rule schemas

@dataclass
class PremiseSpec:
    """Shape of one premise: actives around the conclusion's context.

    ``ctx_ant``/``ctx_suc`` are conclusion indices carried to the premise.
    Links are ``(deep, locA, pathA, locB, pathB)`` where a location is
    ``("principal",)`` or ``("active", premise, side, j)``.
    """

    ant_act: list
    suc_act: list
    ctx_ant: list
    ctx_suc: list
    links: list = field(default_factory=list)

    def sequent(self, concl: Sequent) -> Sequent:
        return Sequent(tuple(self.ant_act) + tuple(concl.ant[i] for i in self.ctx_ant),
                       tuple(concl.suc[i] for i in self.ctx_suc) + tuple(self.suc_act))


class RuleError(ValueError):
    pass


P0 = ("principal",)


def _act(k, side, j):
    return ("active", k, side, j)


def _ctx(concl: Sequent, side: str, idx: int):
    ca = [i for i in range(len(concl.ant)) if not (side == "ant" and i == idx)]
    cs = [i for i in range(len(concl.suc)) if not (side == "suc" and i == idx)]
    return ca, cs


def schema(rule: str, concl: Sequent, side: str | None, idx: int | None, cut: Formula | None = None) -> list:
    """Premise specs for every rule whose premises are fixed by the conclusion.

    ``cut`` is the cut formula for (Cut), and the formula ``A`` for (□Cut)
    and (⊃·).  Raises :class:`RuleError` if the principal has the wrong shape.
    """
    if rule == CUT:
        if cut is None:
            raise RuleError("Cut needs a cut formula")
        ca, cs = list(range(len(concl.ant))), list(range(len(concl.suc)))
        return [PremiseSpec([], [cut], ca, cs, [(True, _act(0, "suc", 0), (), _act(1, "ant", 0), ())]),
                PremiseSpec([cut], [], ca, cs)]
    if side not in ("ant", "suc") or idx is None or not 0 <= idx < len(concl.side(side)):
        raise RuleError("principal reference out of range")
    f = concl.side(side)[idx]
    ca, cs = _ctx(concl, side, idx)

    def need(cls, want_side):
        if side != want_side or not isinstance(f, cls):
            raise RuleError(f"{rule} needs a principal {cls.__name__} on the {want_side} side")

    if rule == NOT_L:
        need(Not, "ant")
        return [PremiseSpec([], [f.body], ca, cs, [(True, _act(0, "suc", 0), (), P0, (0,))])]
    if rule == NOT_R:
        need(Not, "suc")
        return [PremiseSpec([f.body], [], ca, cs, [(True, _act(0, "ant", 0), (), P0, (0,))])]
    if rule == AND_L:
        need(And, "ant")
        return [PremiseSpec([f.left, f.right], [], ca, cs,
                            [(True, _act(0, "ant", 0), (), P0, (0,)), (True, _act(0, "ant", 1), (), P0, (1,))])]
    if rule == AND_R:
        need(And, "suc")
        return [PremiseSpec([], [f.left], ca, cs, [(True, _act(0, "suc", 0), (), P0, (0,))]),
                PremiseSpec([], [f.right], ca, cs, [(True, _act(1, "suc", 0), (), P0, (1,))])]
    if rule == OR_L:
        need(Or, "ant")
        return [PremiseSpec([f.left], [], ca, cs, [(True, _act(0, "ant", 0), (), P0, (0,))]),
                PremiseSpec([f.right], [], ca, cs, [(True, _act(1, "ant", 0), (), P0, (1,))])]
    if rule == OR_R:
        need(Or, "suc")
        return [PremiseSpec([], [f.left, f.right], ca, cs,
                            [(True, _act(0, "suc", 0), (), P0, (0,)), (True, _act(0, "suc", 1), (), P0, (1,))])]
    if rule == IMP_L:
        need(Implies, "ant")
        return [PremiseSpec([], [f.left], ca, cs, [(True, _act(0, "suc", 0), (), P0, (0,))]),
                PremiseSpec([f.right], [], ca, cs, [(True, _act(1, "ant", 0), (), P0, (1,))])]
    if rule == IMP_R:
        need(Implies, "suc")
        return [PremiseSpec([f.left], [f.right], ca, cs,
                            [(True, _act(0, "ant", 0), (), P0, (0,)), (True, _act(0, "suc", 0), (), P0, (1,))])]
    if rule == BOX_L:
        need(Box, "ant")
        return [PremiseSpec([f.body, f], [], ca, cs,
                            [(True, _act(0, "ant", 0), (), P0, (0,)), (True, _act(0, "ant", 1), (), P0, ())])]
    if rule == DIA_R:
        need(Diamond, "suc")
        return [PremiseSpec([], [f.body, f], ca, cs,
                            [(True, _act(0, "suc", 0), (), P0, (0,)), (True, _act(0, "suc", 1), (), P0, ())])]
    if rule == PROOF_L:
        need(Proof, "ant")
        return [PremiseSpec([f.body, f], [], ca, cs,
                            [(True, _act(0, "ant", 0), (), P0, (0,)), (True, _act(0, "ant", 1), (), P0, ())])]
    if rule == BANG_R:
        need(Proof, "suc")
        if not (isinstance(f.term, Bang) and isinstance(f.body, Proof) and f.body.term == f.term.body):
            raise RuleError("⊃! needs a principal of the form !t:t:A")
        return [PremiseSpec([], [f.body, f], ca, cs,
                            [(False, _act(0, "suc", 0), (), P0, ()),
                             (True, _act(0, "suc", 0), (), P0, (0,)),
                             (True, _act(0, "suc", 1), (), P0, ())])]
    if rule == SUM_R:
        need(Proof, "suc")
        if not isinstance(f.term, Sum):
            raise RuleError("⊃+ needs a principal of the form (s+t):A")
        s_a, t_a = Proof(f.term.left, f.body), Proof(f.term.right, f.body)
        return [PremiseSpec([], [s_a, t_a, f], ca, cs,
                            [(False, _act(0, "suc", 0), (), P0, ()), (True, _act(0, "suc", 0), (0,), P0, (0,)),
                             (False, _act(0, "suc", 1), (), P0, ()), (True, _act(0, "suc", 1), (0,), P0, (0,)),
                             (True, _act(0, "suc", 2), (), P0, ())])]
    if rule == APP_R:
        need(Proof, "suc")
        if not isinstance(f.term, App):
            raise RuleError("⊃· needs a principal of the form (s*t):B")
        if cut is None:
            raise RuleError("⊃· needs the formula A")
        t_a = Proof(f.term.right, cut)
        s_ab = Proof(f.term.left, Implies(cut, f.body))
        return [PremiseSpec([], [t_a, f], ca, cs,
                            [(False, _act(0, "suc", 0), (), P0, ()),
                             (True, _act(0, "suc", 0), (0,), _act(1, "suc", 0), (0, 0)),
                             (True, _act(0, "suc", 1), (), P0, ())]),
                PremiseSpec([], [s_ab, f], ca, cs,
                            [(False, _act(1, "suc", 0), (), P0, ()),
                             (True, _act(1, "suc", 0), (0, 1), P0, (0,)),
                             (True, _act(1, "suc", 1), (), P0, ())])]
    if rule == BOXCUT:
        need(Box, "suc")
        if cut is None:
            raise RuleError("□Cut needs the formula A")
        box_a, box_ab = Box(cut), Box(Implies(cut, f.body))
        return [PremiseSpec([], [box_a, f], ca, cs,
                            [(False, _act(0, "suc", 0), (), P0, ()),
                             (True, _act(0, "suc", 0), (0,), _act(1, "suc", 0), (0, 0)),
                             (True, _act(0, "suc", 1), (), P0, ())]),
                PremiseSpec([], [box_ab, f], ca, cs,
                            [(False, _act(1, "suc", 0), (), P0, ()),
                             (True, _act(1, "suc", 0), (0, 1), P0, (0,)),
                             (True, _act(1, "suc", 1), (), P0, ())])]
    raise RuleError(f"{rule} has no fixed premise shape")


DETERMINED = {NOT_L, NOT_R, AND_L, AND_R, OR_L, OR_R, IMP_L, IMP_R, BOX_L, DIA_R, PROOF_L,
              BANG_R, SUM_R, APP_R, CUT, BOXCUT}
TWO_FORMULA_RULES = {APP_R: 0, BOXCUT: 0}  # premise order may be swapped in encodings


def premises_for(rule: str, concl: Sequent, side=None, idx=None, cut=None) -> list:
    """Backward application: the premise sequents of a determined rule."""
    return [spec.sequent(concl) for spec in schema(rule, concl, side, idx, cut)]


# ----------------------------------------------------------- matching

def _pick(cands: list, forms, target: Formula, latest: bool):
    sig = tag_signature(target)
    pool = [i for i in cands if forms[i] == target]
    if not pool:
        return None
    exact = [i for i in pool if tag_signature(forms[i]) == sig]
    use = exact or pool
    return use[-1] if latest else use[0]


def _match_side(prem_forms: tuple, actives: list, ctx_forms: list, side: str, k: int):
    """Assign premise positions to actives then to context entries.

    ``ctx_forms`` is a list of ``(concl_index, formula)``.  Returns
    ``(active_pos, ctx_map)`` or raises :class:`RuleError`.
    """
    free = list(range(len(prem_forms)))
    active_pos = []
    order = range(len(actives)) if side == "ant" else range(len(actives) - 1, -1, -1)
    slots = [None] * len(actives)
    for j in order:
        i = _pick(free, prem_forms, actives[j], latest=(side == "suc"))
        if i is None:
            raise RuleError(f"premise {k} lacks active formula {render(actives[j])} on the {side} side")
        free.remove(i)
        slots[j] = i
    active_pos = slots
    ctx_map = {}
    remaining = list(ctx_forms)
    for i in free:
        f = prem_forms[i]
        sig = tag_signature(f)
        choice = None
        for n, (ci, g) in enumerate(remaining):
            if g == f and tag_signature(g) == sig:
                choice = n
                break
        if choice is None:
            for n, (ci, g) in enumerate(remaining):
                if g == f:
                    choice = n
                    break
        if choice is None:
            raise RuleError(f"premise {k} has unexpected {side} formula {render(f)}")
        ctx_map[i] = remaining.pop(choice)[0]
    if remaining:
        raise RuleError(f"premise {k} misses context formula {render(remaining[0][1])} on the {side} side")
    return active_pos, ctx_map


def _match_sub(prem_forms: tuple, pool: list, side: str, k: int) -> dict:
    """Premise formulas must be a sub-multiset of ``pool`` (pairs of index, formula)."""
    remaining = list(pool)
    out = {}
    for i, f in enumerate(prem_forms):
        sig = tag_signature(f)
        choice = next((n for n, (_, g) in enumerate(remaining) if g == f and tag_signature(g) == sig), None)
        if choice is None:
            choice = next((n for n, (_, g) in enumerate(remaining) if g == f), None)
        if choice is None:
            raise RuleError(f"premise {k}: {side} formula {render(f)} not available in the conclusion")
        out[i] = remaining.pop(choice)[0]
    return out


# --------------------------------------------------------- node checking

@dataclass
class NodeInstance:
    """Result of checking one node: the symbol-level links it contributes."""

    rule: str
    links: list  # (deep, occA, occB) with occ = (addr, side, idx, path)
    cut: Formula | None = None


def _infer_two_formula(rule, node) -> tuple:
    """Find the formula A of a (□Cut)/(⊃·) node and the premise order."""
    concl, pr = node.sequent, node.principal
    f = concl.side(pr.side)[pr.index]
    cands = []
    for k, prem in enumerate(node.premises):
        for g in prem.sequent.suc:
            if rule == BOXCUT and isinstance(g, Box) and isinstance(g.body, Implies) and g.body.right == f.body:
                cands.append((g.body.left, k))
            if rule == APP_R and isinstance(g, Proof) and isinstance(f.term, App) and g.term == f.term.left \
                    and isinstance(g.body, Implies) and g.body.right == f.body:
                cands.append((g.body.left, k))
    return cands


def _axiom_mode_ok(a: Formula, axiom_mode: str, schemas) -> bool:
    return axioms.is_lp_axiom(a, axiom_mode, schemas)


def check_node(node: ProofNode, addr: tuple, axiom_mode: str = "tautology",
               schemas=axioms.DEFAULT_A0_SCHEMAS) -> NodeInstance:
    rule = node.rule
    concl = node.sequent
    pr = node.principal
    prem = node.premises

    def occ(a, side, i, path=()):
        return (a, side, i, path)

    if rule == AX:
        if prem:
            raise RuleError("Ax has no premises")
        if pr is not None and pr.side is not None:
            f = concl.side(pr.side)[pr.index] if 0 <= pr.index < len(concl.side(pr.side)) else None
            other = concl.suc if pr.side == "ant" else concl.ant
            if not isinstance(f, Atom) or f not in other:
                raise RuleError("Ax principal must be an atom occurring on both sides")
        elif not any(isinstance(f, Atom) and f in concl.suc for f in concl.ant):
            raise RuleError("Ax needs an atom on both sides")
        return NodeInstance(rule, [])
    if rule == BOT_L:
        if prem:
            raise RuleError("⊥⊃ has no premises")
        if not any(isinstance(f, Bottom) for f in concl.ant):
            raise RuleError("⊥⊃ needs ⊥ in the antecedent")
        return NodeInstance(rule, [])
    if pr is None:
        raise RuleError(f"{rule} needs a principal reference")

    if rule in (BOX_R, DIA_L):
        want_side, cls = ("suc", Box) if rule == BOX_R else ("ant", Diamond)
        f = _principal(concl, pr, want_side, cls, rule)
        if len(prem) != 1:
            raise RuleError(f"{rule} has exactly one premise")
        ps = prem[0].sequent
        if rule == BOX_R:
            if not ps.suc or ps.suc[-1] != f.body:
                raise RuleError("⊃□ premise must end its succedent with the boxed formula's body")
            active = ("suc", len(ps.suc) - 1)
            p_ant, p_suc = list(enumerate(ps.ant)), list(enumerate(ps.suc[:-1]))
        else:
            if not ps.ant or ps.ant[0] != f.body:
                raise RuleError("◇⊃ premise must start its antecedent with the diamond's body")
            active = ("ant", 0)
            p_ant, p_suc = list(enumerate(ps.ant))[1:], list(enumerate(ps.suc))
        if any(not isinstance(g, Box) for _, g in p_ant):
            raise RuleError(f"{rule} premise antecedent may only hold boxed formulas")
        if any(not isinstance(g, Diamond) for _, g in p_suc):
            raise RuleError(f"{rule} premise succedent may only hold diamond formulas besides the active one")
        pool_ant = [(i, g) for i, g in enumerate(concl.ant) if not (pr.side == "ant" and i == pr.index)]
        pool_suc = [(i, g) for i, g in enumerate(concl.suc) if not (pr.side == "suc" and i == pr.index)]
        m_ant = _match_sub(tuple(g for _, g in p_ant), pool_ant, "ant", 0)
        m_suc = _match_sub(tuple(g for _, g in p_suc), pool_suc, "suc", 0)
        links = [(True, occ(addr + (0,), active[0], active[1]), occ(addr, pr.side, pr.index, (0,)))]
        for n, (pi, _) in enumerate(p_ant):
            links.append((True, occ(addr + (0,), "ant", pi), occ(addr, "ant", m_ant[n])))
        for n, (pi, _) in enumerate(p_suc):
            links.append((True, occ(addr + (0,), "suc", pi), occ(addr, "suc", m_suc[n])))
        return NodeInstance(rule, links)

    if rule in (CONST_R, TERM_R):
        f = _principal(concl, pr, "suc", Proof, rule)
        if len(prem) != 1:
            raise RuleError(f"{rule} has exactly one premise")
        ps = prem[0].sequent
        if rule == CONST_R:
            if not isinstance(f.term, Const):
                raise RuleError("⊃:c needs a constant")
            if ps.ant or ps.suc != (f.body,):
                raise RuleError("⊃:c premise must be '=> A'")
            if not _axiom_mode_ok(f.body, axiom_mode, schemas):
                raise RuleError(f"⊃:c body {render(f.body)} is not an LP axiom")
            return NodeInstance(rule, [(True, occ(addr + (0,), "suc", 0), occ(addr, "suc", pr.index, (0,)))])
        if ps.ant != (f,) or ps.suc != (f.body,):
            raise RuleError("⊃:t premise must be 't:A => A'")
        pool = [(i, g) for i, g in enumerate(concl.ant)]
        m = _match_sub(ps.ant, pool, "ant", 0)
        return NodeInstance(rule, [(True, occ(addr + (0,), "suc", 0), occ(addr, "suc", pr.index, (0,))),
                                   (True, occ(addr + (0,), "ant", 0), occ(addr, "ant", m[0]))])

    if rule not in DETERMINED:
        raise RuleError(f"unknown rule {rule}")

    cut = pr.cut
    if rule == CUT:
        if cut is None:
            raise RuleError("Cut needs a cut formula")
        specs = schema(rule, concl, None, None, cut)
        order = [0, 1]
    else:
        if pr.side is None or pr.index is None or not 0 <= pr.index < len(concl.side(pr.side)):
            raise RuleError("principal reference out of range")
        order = [0, 1] if len(prem) == 2 else [0]
        if rule in TWO_FORMULA_RULES:
            cands = _infer_two_formula(rule, node)
            if cut is not None:
                cands = [c for c in cands if c[0] == cut] or [(cut, 1)]
            if not cands:
                raise RuleError(f"{rule}: cannot find the implication premise")
            last_err = None
            for a, k in cands:
                try:
                    specs = schema(rule, concl, pr.side, pr.index, a)
                    order = [1, 0] if k == 0 else [0, 1]
                    return _finish(rule, node, addr, specs, order, a)
                except RuleError as e:
                    last_err = e
            raise last_err
        specs = schema(rule, concl, pr.side, pr.index, cut)
    return _finish(rule, node, addr, specs, order, cut)


def _principal(concl, pr, want_side, cls, rule):
    if pr.side != want_side or pr.index is None or not 0 <= pr.index < len(concl.side(want_side)):
        raise RuleError(f"{rule} principal must be on the {want_side} side")
    f = concl.side(want_side)[pr.index]
    if not isinstance(f, cls):
        raise RuleError(f"{rule} principal must be a {cls.__name__}")
    return f


def _finish(rule, node, addr, specs, order, cut) -> NodeInstance:
    """Match the actual premises (``order[k]`` realises premise schema k) and emit links."""
    concl, pr = node.sequent, node.principal
    if len(node.premises) != len(specs):
        raise RuleError(f"{rule} needs {len(specs)} premise(s), got {len(node.premises)}")
    links = []
    act_occ = {}
    for k, spec in enumerate(specs):
        real = order[k]
        ps = node.premises[real].sequent
        a_pos, a_ctx = _match_side(ps.ant, spec.ant_act, [(i, concl.ant[i]) for i in spec.ctx_ant], "ant", real)
        s_pos, s_ctx = _match_side(ps.suc, spec.suc_act, [(i, concl.suc[i]) for i in spec.ctx_suc], "suc", real)
        for j, i in enumerate(a_pos):
            act_occ[(k, "ant", j)] = (addr + (real,), "ant", i)
        for j, i in enumerate(s_pos):
            act_occ[(k, "suc", j)] = (addr + (real,), "suc", i)
        for i, ci in a_ctx.items():
            links.append((True, (addr + (real,), "ant", i, ()), (addr, "ant", ci, ())))
        for i, ci in s_ctx.items():
            links.append((True, (addr + (real,), "suc", i, ()), (addr, "suc", ci, ())))

    def resolve(loc, path):
        if loc[0] == "principal":
            return (addr, pr.side, pr.index, path)
        _, k, side, j = loc
        a, s, i = act_occ[(k, side, j)]
        return (a, s, i, path)

    for spec in specs:
        for deep, la, pa, lb, pb in spec.links:
            links.append((deep, resolve(la, pa), resolve(lb, pb)))
    return NodeInstance(rule, links, cut)


# ------------------------------------------------------------ validation

@dataclass
class ValidationReport:
    ok: bool
    variant: str
    errors: list = field(default_factory=list)  # (address, message)
    instances: dict = field(default_factory=dict)

    def raise_if_invalid(self):
        if not self.ok:
            addr, msg = self.errors[0]
            raise RuleError(f"invalid proof at node {list(addr)}: {msg}")

    def to_json(self) -> dict:
        return {"ok": self.ok, "variant": self.variant,
                "errors": [{"node": list(a), "message": m} for a, m in self.errors]}


def _language_ok(f: Formula, variant: str) -> str | None:
    if variant == "g3lp":
        return None if is_lp(f) else "modal operator in an LP proof"
    if not is_modal(f):
        return "justification term in a modal proof"
    if variant == "g3s-min" and not is_minimal(f):
        return "non-minimal connective in a G3s-min proof"
    return None


def check_proof(p: ProofNode, variant: str = "g3s", axiom_mode: str = "tautology",
                schemas=axioms.DEFAULT_A0_SCHEMAS) -> ValidationReport:
    variant = canonical_variant(variant)
    allowed = VARIANTS[variant]
    report = ValidationReport(True, variant)
    for addr, node in iter_nodes(p):
        try:
            if node.rule not in allowed:
                raise RuleError(f"rule {node.rule} not permitted in {variant}")
            for _, _, f in node.sequent.formulas():
                msg = _language_ok(f, variant)
                if msg:
                    raise RuleError(msg)
            if node.principal is not None and node.principal.cut is not None:
                msg = _language_ok(node.principal.cut, variant)
                if msg:
                    raise RuleError(msg)
            report.instances[addr] = check_node(node, addr, axiom_mode, schemas)
        except (RuleError, IndexError) as e:
            report.ok = False
            report.errors.append((addr, str(e)))
    return report


def infer_variant(p: ProofNode) -> str:
    used = rules_used(p)
    if used & {PROOF_L, CONST_R, TERM_R, BANG_R, SUM_R, APP_R}:
        return "g3lp"
    if CUT in used and BOXCUT in used:
        return "g3s+cuts"
    if CUT in used:
        return "g3s+cut"
    if BOXCUT in used:
        return "g3s+boxcut"
    for _, n in iter_nodes(p):
        for _, _, f in n.sequent.formulas():
            if isinstance(f, Formula) and any(isinstance(g, Proof) for _, g in positions(f)):
                return "g3lp"
    return "g3s"


# -------------------------------------------------------- correspondence

def symbol_occurrences(p: ProofNode) -> list:
    """All box and justification-term occurrences, in preorder."""
    out = []
    for addr, node in iter_nodes(p):
        for side, i, f in node.sequent.formulas():
            for path, g in positions(f):
                if isinstance(g, (Box, Proof)):
                    out.append((addr, side, i, path))
    return out


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class Correspondence:
    """Partition of symbol occurrences; classes enumerated by first occurrence."""

    proof: ProofNode
    classes: list
    class_of: dict

    def members(self, k: int) -> list:
        return self.classes[k]

    def root_members(self, k: int) -> list:
        return [o for o in self.classes[k] if o[0] == ()]

    def formula_at(self, o) -> Formula:
        addr, side, i, path = o
        return subformula_at(node_at(self.proof, addr).sequent.side(side)[i], path)

    def __len__(self) -> int:
        return len(self.classes)


def build_correspondence(p: ProofNode, report: ValidationReport | None = None,
                         variant: str | None = None) -> Correspondence:
    if report is None:
        report = check_proof(p, variant or infer_variant(p))
    report.raise_if_invalid()
    uf = _UnionFind()
    occs = symbol_occurrences(p)
    for o in occs:
        uf.add(o)
    for addr, inst in report.instances.items():
        for deep, a, b in inst.links:
            _link(p, uf, deep, a, b)
    groups: dict = {}
    for o in occs:
        groups.setdefault(uf.find(o), []).append(o)
    classes = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    class_of = {o: k for k, g in enumerate(classes) for o in g}
    return Correspondence(p, classes, class_of)


def _link(p, uf, deep, a, b):
    fa = subformula_at(node_at(p, a[0]).sequent.side(a[1])[a[2]], a[3])
    fb = subformula_at(node_at(p, b[0]).sequent.side(b[1])[b[2]], b[3])
    if not deep:
        if isinstance(fa, (Box, Proof)) and isinstance(fb, (Box, Proof)):
            uf.union(a, b)
        return
    pa = dict(positions(fa))
    for path, g in positions(fb):
        h = pa.get(path)
        if isinstance(g, (Box, Proof)) and isinstance(h, (Box, Proof)):
            uf.union((a[0], a[1], a[2], a[3] + path), (b[0], b[1], b[2], b[3] + path))


class SubformulaViolation(AssertionError):
    pass


def trace_to_root(p: ProofNode, occ, corr: Correspondence | None = None):
    """The unique root occurrence corresponding to ``occ`` in a cut-free proof."""
    if corr is None:
        corr = build_correspondence(p)
    if occ not in corr.class_of:
        raise KeyError(f"no symbol occurrence {occ}")
    roots = corr.root_members(corr.class_of[occ])
    if len(roots) != 1:
        raise SubformulaViolation(f"occurrence {occ} corresponds to {len(roots)} root occurrences")
    return roots[0]


# ------------------------------------------------------------------ JSON

FORMAT = "prehist/1"


def proof_to_json(p: ProofNode, annotated: bool = False) -> dict:
    out = {"rule": p.rule,
           "sequent": {"ant": [render(f, annotated=annotated) for f in p.sequent.ant],
                       "suc": [render(f, annotated=annotated) for f in p.sequent.suc]},
           "premises": [proof_to_json(q, annotated) for q in p.premises]}
    pr = p.principal
    if pr is not None:
        d = {}
        if pr.side is not None:
            d["side"], d["index"] = pr.side, pr.index
        if pr.cut is not None:
            d["cut"] = render(pr.cut)
        out["principal"] = d
    return out


def proof_from_json(d: dict, language: str = "any", const_prefixes=DEFAULT_CONST_PREFIXES) -> ProofNode:
    try:
        rule = canonical_rule(d["rule"])
        seq = d["sequent"]
        ant = tuple(parse(s, language, const_prefixes) for s in seq.get("ant", []))
        suc = tuple(parse(s, language, const_prefixes) for s in seq.get("suc", []))
        pr = None
        if d.get("principal") is not None:
            pd = d["principal"]
            cut = parse(pd["cut"], language, const_prefixes) if pd.get("cut") is not None else None
            side = pd.get("side")
            if side is not None and side not in ("ant", "suc"):
                raise ValueError(f"bad principal side {side!r}")
            pr = Principal(side, pd.get("index"), cut)
        prem = tuple(proof_from_json(q, language, const_prefixes) for q in d.get("premises", []))
    except KeyError as e:
        raise ValueError(f"proof node misses field {e}") from None
    return ProofNode(rule, Sequent(ant, suc), pr, prem)


def load_proof(path: str) -> ProofNode:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "proof" in data and "rule" not in data:
        data = data["proof"]
    return proof_from_json(data)


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
