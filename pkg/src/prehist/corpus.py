"""Seeded generators for the property-test corpora."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .proofs import AX, BOT_L, BOX_L, BOX_R, CUT, IMP_L, IMP_R, Principal, ProofNode, RuleError, Sequent, check_node, \
    check_proof, render_sequent
from .prover import decide_g3s, search_g3lp
from .syntax import BOTTOM, And, Atom, Box, Formula, Implies, Not, Or, parse, render

MINIMAL_ATOMS = ("P", "Q")


def random_minimal(rng: random.Random, depth: int, atoms=MINIMAL_ATOMS) -> Formula:
    """Random formula over ⊥, →, □."""
    if depth <= 0 or rng.random() < 0.3:
        return BOTTOM if rng.random() < 0.08 else Atom(rng.choice(atoms))
    r = rng.random()
    if r < 0.45:
        return Box(random_minimal(rng, depth - 1, atoms))
    return Implies(random_minimal(rng, depth - 1, atoms), random_minimal(rng, depth - 1, atoms))


def random_full(rng: random.Random, depth: int, atoms=MINIMAL_ATOMS) -> Formula:
    """Random ◇-free modal formula with all classical connectives."""
    if depth <= 0 or rng.random() < 0.3:
        return Atom(rng.choice(atoms))
    r = rng.random()
    if r < 0.3:
        return Box(random_full(rng, depth - 1, atoms))
    if r < 0.45:
        return Not(random_full(rng, depth - 1, atoms))
    cls = rng.choice((And, Or, Implies))
    return cls(random_full(rng, depth - 1, atoms), random_full(rng, depth - 1, atoms))


def _boxy(rng: random.Random, depth: int, atoms=MINIMAL_ATOMS) -> Formula:
    f = random_minimal(rng, depth, atoms)
    return Box(f) if rng.random() < 0.5 else f


def random_sequent(rng: random.Random, depth: int = 2, max_side: int = 2, gen=random_minimal) -> Sequent:
    ant = tuple(gen(rng, depth) for _ in range(rng.randint(0, max_side)))
    suc = tuple(gen(rng, depth) for _ in range(rng.randint(0, max_side)))
    return Sequent(ant, suc)


@dataclass
class CutInstance:
    left: ProofNode
    right: ProofNode
    cut: Formula

    @property
    def proof(self) -> ProofNode:
        left = self.left.sequent
        return ProofNode(CUT, Sequent(left.ant, left.suc[:-1]), Principal(cut=self.cut), (self.left, self.right))

    @property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size


def _union(a, b) -> tuple:
    """Multiset union (maximum multiplicities), keeping the order of ``a`` first."""
    need = Counter(b)
    for f in a:
        if need[f] > 0:
            need[f] -= 1
    out = list(a)
    for f in b:
        if need[f] > 0:
            out.append(f)
            need[f] -= 1
    return tuple(out)


def _minus(forms, f) -> tuple:
    i = forms.index(f)
    return forms[:i] + forms[i + 1:]


class ProofBuilder:
    """Forward construction of random cut-free G3s proofs over ⊥, →, □.

    Contexts come from random weakening, so (⊃□) premises keep arbitrary
    subsets of the available boxes; this gives proof shapes a backward
    prover never produces.
    """

    def __init__(self, rng: random.Random, max_nodes: int = 10, atoms=MINIMAL_ATOMS):
        self.rng, self.max_nodes, self.atoms = rng, max_nodes, atoms
        self.pool: list = []

    def _extra(self):
        r = self.rng
        return tuple(random_minimal(r, 1, self.atoms) for _ in range(r.choice((0, 0, 1))))

    def _leaf(self):
        r = self.rng
        if r.random() < 0.1:
            return ProofNode(BOT_L, Sequent((BOTTOM,) + self._extra(), self._extra()))
        a = Atom(r.choice(self.atoms))
        return ProofNode(AX, Sequent((a,) + self._extra(), self._extra() + (a,)), Principal("ant", 0))

    def _step(self):
        from .transforms import weaken, weaken_to
        r = self.rng
        if not self.pool or r.random() < 0.2:
            return self._leaf()
        q = r.choice(self.pool)
        s = q.sequent
        rule = r.choice((BOX_R, BOX_R, BOX_L, IMP_R, IMP_R, IMP_L))
        if rule == BOX_R:
            if len(s.suc) != 1 or not all(isinstance(f, Box) for f in s.ant):
                boxes = tuple(f for f in s.ant if isinstance(f, Box))
                return None if boxes == s.ant else None
            ant = s.ant + tuple(f for f in self._extra())
            concl = Sequent(ant, self._extra() + (Box(s.suc[0]),))
            return ProofNode(BOX_R, concl, Principal("suc", len(concl.suc) - 1), (q,))
        if rule == BOX_L:
            if not s.ant:
                return None
            a = r.choice(s.ant)
            q2 = weaken(q, Box(a), "ant")
            ant = _minus(q2.sequent.ant, a)
            concl = Sequent(ant, s.suc)
            return ProofNode(BOX_L, concl, Principal("ant", len(ant) - 1), (q2,))
        if rule == IMP_R:
            if not s.suc:
                return None
            b = r.choice(s.suc)
            if s.ant and r.random() < 0.7:
                a = r.choice(s.ant)
            else:
                a = random_minimal(r, 1, self.atoms)
                q = weaken(q, a, "ant")
                s = q.sequent
            concl = Sequent(_minus(s.ant, a), _minus(s.suc, b) + (Implies(a, b),))
            return ProofNode(IMP_R, concl, Principal("suc", len(concl.suc) - 1), (q,))
        q2 = r.choice(self.pool)
        if not s.suc or not q2.sequent.ant:
            return None
        a, b = r.choice(s.suc), r.choice(q2.sequent.ant)
        ctx_a = _union(s.ant, _minus(q2.sequent.ant, b))
        ctx_s = _union(_minus(s.suc, a), q2.sequent.suc)
        left = weaken_to(q, Sequent(ctx_a, ctx_s + (a,)))
        right = weaken_to(q2, Sequent((b,) + ctx_a, ctx_s))
        concl = Sequent(ctx_a + (Implies(a, b),), ctx_s)
        return ProofNode(IMP_L, concl, Principal("ant", len(concl.ant) - 1), (left, right))

    def grow(self, steps: int) -> list:
        for _ in range(steps):
            try:
                p = self._step()
            except RuleError:
                continue
            if p is None or p.size > self.max_nodes or len(p.sequent.ant) + len(p.sequent.suc) > 5:
                continue
            try:
                check_node(p, ())
            except RuleError:
                continue
            self.pool.append(p)
        return self.pool


def built_cut_corpus(n: int, seed: int = 0, max_nodes: int = 12, atoms=MINIMAL_ATOMS) -> list:
    """Cut instances assembled from forward-built proofs."""
    from .transforms import weaken_to
    rng = random.Random(seed)
    pool = ProofBuilder(rng, max_nodes - 2, atoms).grow(6000)
    by_ant: dict = {}
    by_box_premise: dict = {}
    for q in pool:
        for f in set(q.sequent.ant):
            by_ant.setdefault(f, []).append(q)
        if q.rule == BOX_R:
            for f in set(q.premises[0].sequent.ant):
                by_box_premise.setdefault(f, []).append(q)
    box_intros = [q for q in pool if q.rule == BOX_R]
    out, seen = [], set()
    for _ in range(40 * n):
        if len(out) >= n:
            break
        # half of the draws target the (⊃□)-against-(⊃□) key case
        if box_intros and rng.random() < 0.5:
            q1 = rng.choice(box_intros)
            a = q1.sequent.suc[q1.principal.index]
            index = by_box_premise
        else:
            q1 = rng.choice(pool)
            if not q1.sequent.suc:
                continue
            a = rng.choice(q1.sequent.suc)
            index = by_ant
        cands = [q for q in index.get(a, ()) if q.size + q1.size + 1 <= max_nodes]
        if not cands:
            continue
        q2 = rng.choice(cands)
        ctx_a = _union(q1.sequent.ant, _minus(q2.sequent.ant, a))
        ctx_s = _union(_minus(q1.sequent.suc, a), q2.sequent.suc)
        left = weaken_to(q1, Sequent(ctx_a, ctx_s + (a,)))
        right = weaken_to(q2, Sequent((a,) + ctx_a, ctx_s))
        key = (id(q1), id(q2), render(a))
        if key in seen:
            continue
        seen.add(key)
        out.append(CutInstance(left, right, a))
    return out


def cut_corpus(n: int = 500, seed: int = 0, max_nodes: int = 12, atoms=MINIMAL_ATOMS,
               max_tries: int = 200000) -> list:
    """Distinct cut-bearing G3s proofs ``Cut(Γ ⊃ Δ, A ; A, Γ ⊃ Δ)`` with at most ``max_nodes`` nodes.

    Half come from premises found by backward search, half from forward-built
    proofs (see :class:`ProofBuilder`).
    """
    built = built_cut_corpus(n - n // 2, seed, max_nodes, atoms)
    n = n - len(built)
    rng = random.Random(seed)
    cache: dict = {}

    def prove(s, lean):
        key = (render_sequent(s), lean)
        if key not in cache:
            cache[key] = decide_g3s(s, lean=lean, rng=rng if lean else None).proof
        return cache[key]

    out, seen = [], set()
    for _ in range(max_tries):
        if len(out) >= n:
            break
        ctx = random_sequent(rng, depth=2, max_side=2, gen=_boxy)
        a = _boxy(rng, rng.choice((0, 1, 2, 2)), atoms)
        ls, rs = Sequent(ctx.ant, ctx.suc + (a,)), Sequent((a,) + ctx.ant, ctx.suc)
        key = (render_sequent(ls), render_sequent(rs))
        if key in seen:
            continue
        seen.add(key)
        if len(ls.ant) + len(ls.suc) > 4:
            continue
        lean = rng.random() < 0.5
        pl = prove(ls, lean)
        if pl is None or pl.size > max_nodes - 2:
            continue
        pr = prove(rs, lean)
        if pr is None:
            continue
        inst = CutInstance(pl, pr, a)
        if inst.size <= max_nodes:
            out.append(inst)
    return out + built


def cut_free_corpus(n: int = 200, seed: int = 1, max_nodes: int = 40, gen=random_minimal) -> list:
    """Machine-found cut-free G3s proofs of random sequents."""
    rng = random.Random(seed)
    out, seen = [], set()
    for _ in range(50 * n):
        if len(out) >= n:
            break
        s = random_sequent(rng, depth=3, max_side=2, gen=gen)
        key = render_sequent(s)
        if key in seen or not (s.ant or s.suc):
            continue
        seen.add(key)
        p = decide_g3s(s).proof
        if p is not None and p.size <= max_nodes:
            out.append(p)
    return out


# -------------------------------------------------------------- G3lp

_VARS = ("x", "y", "z")
_CONSTS = ("c1", "c2")

# templates over one or two formulas F, G and variables/constants; each is provable
# in G3lp whenever instantiated (possibly after a short search)
_LP_TEMPLATES = (
    "{u}:{F} => {u}:{F}",
    "{u}:{F} => {F}",
    "{u}:{F} => ({u}+{v}):{F}",
    "{v}:{F} => ({u}+{v}):{F}",
    "{u}:{F} => !{u}:{u}:{F}",
    "{u}:({F} -> {G}), {v}:{F} => ({u}*{v}):{G}",
    "=> {c}:({F} -> {F})",
    "=> {c}:({u}:{F} -> {F})",
    "=> {c}:({u}:{F} -> !{u}:{u}:{F})",
    "=> {c}:({u}:{F} -> ({u}+{v}):{F})",
    "=> {c}:({u}:({F} -> {G}) -> ({v}:{F} -> ({u}*{v}):{G}))",
    "{u}:{F} => ({c}*{u}):({F} | {G})",
    "{u}:({F} & {G}) => ({c}*{u}):{F}",
    "=> {u}:{F} -> ({u}+{v}):{F}",
    "=> {u}:{F} -> !{u}:{u}:{F}",
    "{u}:{F}, {v}:{G} => ({c}*{u}):({G} -> {F})",
    "=> ~{u}:({F} & ~({c}*{u}):{F})",
    "=> {v}:({F} & ~({v}*{u}):{F} -> {F}) -> ~{u}:({F} & ~({v}*{u}):{F})",
    "{u}:{F} => ({c}*!{u}):{u}:{F}",
    "{u}:{F} => ({c}*{u}):({v}:{G} -> {F})",
)


def _lp_body(rng: random.Random, depth: int) -> str:
    if depth <= 0 or rng.random() < 0.45:
        return rng.choice(("P", "Q"))
    r = rng.random()
    if r < 0.25:
        return f"~{_lp_body(rng, depth - 1)}"
    op = rng.choice(("&", "|", "->"))
    return f"({_lp_body(rng, depth - 1)} {op} {_lp_body(rng, depth - 1)})"


def random_lp_sequent(rng: random.Random) -> tuple:
    tmpl = rng.choice(_LP_TEMPLATES)
    u, v = rng.sample(_VARS, 2)
    text = tmpl.format(F=_lp_body(rng, 2), G=_lp_body(rng, 1), u=u, v=v, c=rng.choice(_CONSTS))
    from .proofs import parse_sequent
    return text, parse_sequent(text, language="lp")


def g3lp_corpus(n: int = 200, seed: int = 2, depth_bound: int = 24) -> list:
    """Validated G3lp proofs of random template instances (``(text, proof)`` pairs)."""
    rng = random.Random(seed)
    out, seen = [], set()
    for _ in range(40 * n):
        if len(out) >= n:
            break
        text, s = random_lp_sequent(rng)
        if text in seen:
            continue
        seen.add(text)
        forbid = "~" in text.split("=>")[1] and rng.random() < 0.5
        res = search_g3lp(s, forbid_const_intro=forbid, depth_bound=depth_bound)
        if res.proof is None:
            continue
        if check_proof(res.proof, "g3lp").ok:
            out.append((text, res.proof))
    return out


__all__ = ["CutInstance", "cut_corpus", "cut_free_corpus", "g3lp_corpus", "random_full", "random_lp_sequent",
           "random_minimal", "random_sequent", "render", "parse"]
