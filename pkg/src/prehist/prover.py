"""Backward proof search for G3s and G3lp.

Invertible rules are applied eagerly (single-premise before branching),
then boxed antecedents are unpacked once per world, and only then are the
modal rules tried.  A sequent that repeats as a set on its own branch is
pruned.

The cycle-free search tags every root box with its family number and
carries the tags through the search; since cut-free rules only move
subformulas around, the tag of any generated box is its root family.
Edges of the prehistoric graph accumulate monotonically, so a partial
proof whose edges already form a cycle can be dropped.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .proofs import (
    AND_L, AND_R, APP_R, AX, BANG_R, BOT_L, BOX_L, BOX_R, CONST_R, DIA_L, DIA_R, IMP_L, IMP_R,
    NOT_L, NOT_R, OR_L, OR_R, PROOF_L, SUM_R, TERM_R, Principal, ProofNode, Sequent, premises_for,
)
from . import axioms
from .transforms import reorder as reorder_root
from .syntax import (
    And, App, Atom, Bang, Bottom, Box, Const, Diamond, Formula, Implies, Not, Or, Proof, Sum,
    children, lp_subformulas, positions, rebuild, render, tag_signature,
)

PROVED, UNPROVABLE = "Proved", "Unprovable"
CYCLE_FREE, NO_CYCLE_FREE, BOUND = "CycleFreeProved", "NoCycleFreeProof", "BoundExceeded"


@dataclass
class SearchResult:
    kind: str
    proof: ProofNode | None = None
    certificate: dict = field(default_factory=dict)
    bound: int | None = None

    @property
    def proved(self) -> bool:
        return self.kind in (PROVED, CYCLE_FREE)

    def to_json(self) -> dict:
        from .proofs import proof_to_json
        out = {"result": self.kind, "certificate": dict(self.certificate)}
        if self.proof is not None:
            out["proof"] = proof_to_json(self.proof)
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass
class _Stats:
    nodes: int = 0
    loop_hits: int = 0
    cycle_prunes: int = 0
    bound_hits: int = 0

    def as_dict(self) -> dict:
        return {"explored": self.nodes, "loop_hits": self.loop_hits,
                "cycle_prunes": self.cycle_prunes, "bound_hits": self.bound_hits}


def _fkey(f: Formula):
    return (f, tag_signature(f))


def _skey(forms) -> frozenset:
    return frozenset(_fkey(f) for f in forms)


def _mkey(forms) -> frozenset:
    return frozenset(Counter(_fkey(f) for f in forms).items())


def _node(rule, seq, side=None, idx=None, premises=(), cut=None) -> ProofNode:
    pr = Principal(side, idx, cut) if (side is not None or cut is not None) else None
    return ProofNode(rule, seq, pr, tuple(premises))


def _axiom(seq: Sequent) -> ProofNode | None:
    for i, f in enumerate(seq.ant):
        if isinstance(f, Bottom):
            return _node(BOT_L, seq)
    suc = set(f for f in seq.suc if isinstance(f, Atom))
    for i, f in enumerate(seq.ant):
        if isinstance(f, Atom) and f in suc:
            return _node(AX, seq, "ant", i)
    return None


_SINGLE = ((NOT_L, "ant", Not), (AND_L, "ant", And), (NOT_R, "suc", Not), (OR_R, "suc", Or),
           (IMP_R, "suc", Implies))
_BRANCH = ((IMP_L, "ant", Implies), (AND_R, "suc", And), (OR_L, "ant", Or))


def _invertible(seq: Sequent):
    for group in (_SINGLE, _BRANCH):
        for rule, side, cls in group:
            for i, f in enumerate(seq.side(side)):
                if isinstance(f, cls):
                    return rule, side, i
    return None


def _unpack_candidate(seq: Sequent, unpacked: frozenset):
    ant_keys = {_fkey(f) for f in seq.ant}
    for i, f in enumerate(seq.ant):
        if isinstance(f, (Box, Proof)) and _fkey(f) not in unpacked and _fkey(f.body) not in ant_keys:
            return (BOX_L if isinstance(f, Box) else PROOF_L), "ant", i, _fkey(f)
    suc_keys = {_fkey(f) for f in seq.suc}
    for i, f in enumerate(seq.suc):
        if isinstance(f, Diamond) and ("dia",) + _fkey(f) not in unpacked and _fkey(f.body) not in suc_keys:
            return DIA_R, "suc", i, ("dia",) + _fkey(f)
    return None


def _distinct(forms) -> list:
    seen, out = set(), []
    for f in forms:
        k = _fkey(f)
        if k not in seen:
            seen.add(k)
            out.append(f)
    return out


# ------------------------------------------------------------ plain G3s

class _G3s:
    def __init__(self, lean: bool = False, rng=None):
        self.stats = _Stats()
        self.cache: dict = {}
        self.lean = lean
        self.rng = rng

    def _box_contexts(self, boxes):
        if not self.lean:
            yield tuple(boxes)
            return
        boxes = list(boxes)
        if self.rng is not None:
            self.rng.shuffle(boxes)
        for n in range(len(boxes) + 1):
            yield from itertools.combinations(boxes, n)

    def prove(self, seq: Sequent, unpacked: frozenset, history: frozenset, jump: bool = True):
        # set-equal repeats are only real loops across a modal jump; inside invertible steps they
        # are just duplicates from ⊃¬ and friends
        key = (_skey(seq.ant), _skey(seq.suc), unpacked)
        if jump and key in history:
            self.stats.loop_hits += 1
            return None
        ckey = (_mkey(seq.ant), _mkey(seq.suc), unpacked)
        if ckey in self.cache:
            return reorder_root(self.cache[ckey], seq)
        self.stats.nodes += 1
        history = history | {key}
        ax = _axiom(seq)
        if ax is not None:
            return ax
        inv = _invertible(seq)
        if inv is not None:
            rule, side, i = inv
            prems = []
            for ps in premises_for(rule, seq, side, i):
                q = self.prove(ps, unpacked, history, False)
                if q is None:
                    return None
                prems.append(q)
            out = _node(rule, seq, side, i, prems)
            self.cache[ckey] = out
            return out
        up = _unpack_candidate(seq, unpacked)
        if up is not None:
            rule, side, i, k = up
            q = self.prove(premises_for(rule, seq, side, i)[0], unpacked | {k}, history, False)
            return None if q is None else _node(rule, seq, side, i, [q])
        boxes = _distinct(f for f in seq.ant if isinstance(f, Box))
        dias = _distinct(f for f in seq.suc if isinstance(f, Diamond))
        tried = set()
        for i, f in enumerate(seq.suc):
            if isinstance(f, Box) and _fkey(f) not in tried:
                tried.add(_fkey(f))
                for ctx in self._box_contexts(boxes):
                    q = self.prove(Sequent(ctx, tuple(dias) + (f.body,)), frozenset(), history)
                    if q is not None:
                        out = _node(BOX_R, seq, "suc", i, [q])
                        self.cache[ckey] = out
                        return out
        for i, f in enumerate(seq.ant):
            if isinstance(f, Diamond) and _fkey(f) not in tried:
                tried.add(_fkey(f))
                q = self.prove(Sequent((f.body,) + tuple(boxes), tuple(dias)), frozenset(), history)
                if q is not None:
                    out = _node(DIA_L, seq, "ant", i, [q])
                    self.cache[ckey] = out
                    return out
        return None


def decide_g3s(s: Sequent, lean: bool = False, rng=None) -> SearchResult:
    """Decide a modal sequent in full G3s.

    With ``lean`` the (⊃□) premises keep as few boxed formulas as possible;
    the verdict is the same, only the proof shape changes.  ``rng`` (a
    ``random.Random``) shuffles the order in which lean contexts are tried.
    """
    eng = _G3s(lean, rng)
    p = eng.prove(s, frozenset(), frozenset())
    cert = eng.stats.as_dict()
    return SearchResult(PROVED, p, cert) if p is not None else SearchResult(UNPROVABLE, None, cert)


# ----------------------------------------------------- cycle-free search

def tag_root_families(s: Sequent) -> tuple:
    """Fresh copy of ``s`` with every box tagged by its root family number."""
    counter = itertools.count()

    def go(f):
        if isinstance(f, Box):
            tag = next(counter)
            return Box(go(f.body), tag)
        kids = children(f)
        return rebuild(f, tuple(go(k) for k in kids)) if kids else f
    ant = tuple(go(f) for f in s.ant)
    suc = tuple(go(f) for f in s.suc)
    return Sequent(ant, suc), next(counter)


def _cyclic(edges) -> bool:
    adj: dict = {}
    for h, j, _ in edges:
        adj.setdefault(h, set()).add(j)
    state: dict = {}

    def visit(v):
        state[v] = 1
        for w in adj.get(v, ()):
            st = state.get(w, 0)
            if st == 1 or (st == 0 and visit(w)):
                return True
        state[v] = 2
        return False
    return any(state.get(v, 0) == 0 and visit(v) for v in list(adj))


def _premise_edges(prem: Sequent, j) -> set:
    out = set()
    for side, _, f in prem.formulas():
        for _, g in positions(f):
            if isinstance(g, Box):
                out.add((g.tag, j, "L" if side == "ant" else "R"))
    return out


class _CycleFree:
    def __init__(self):
        self.stats = _Stats()

    def search(self, seq: Sequent, unpacked: frozenset, history: frozenset, edges: frozenset,
               jump: bool = True):
        key = (_skey(seq.ant), _skey(seq.suc), unpacked)
        if jump and key in history:
            self.stats.loop_hits += 1
            return
        self.stats.nodes += 1
        history = history | {key}
        ax = _axiom(seq)
        if ax is not None:
            yield ax, edges
            return
        inv = _invertible(seq)
        if inv is not None:
            rule, side, i = inv
            prems = premises_for(rule, seq, side, i)
            for built, e in self._all(prems, unpacked, history, edges):
                yield _node(rule, seq, side, i, built), e
            return
        up = _unpack_candidate(seq, unpacked)
        if up is not None:
            rule, side, i, k = up
            for q, e in self.search(premises_for(rule, seq, side, i)[0], unpacked | {k}, history, edges, False):
                yield _node(rule, seq, side, i, [q]), e
            return
        boxes = _distinct(f for f in seq.ant if isinstance(f, Box))
        yielded: list = []
        tried = set()
        for i, f in enumerate(seq.suc):
            if not isinstance(f, Box) or _fkey(f) in tried:
                continue
            tried.add(_fkey(f))
            for size in range(len(boxes), -1, -1):
                for keep in itertools.combinations(boxes, size):
                    prem = Sequent(tuple(keep), (f.body,))
                    new = edges | _premise_edges(prem, f.tag)
                    if _cyclic(new):
                        self.stats.cycle_prunes += 1
                        continue
                    for q, e in self.search(prem, frozenset(), history, frozenset(new)):
                        if any(y <= e for y in yielded):
                            continue
                        yielded.append(e)
                        yield _node(BOX_R, seq, "suc", i, [q]), e

    def _all(self, prems, unpacked, history, edges):
        if not prems:
            yield [], edges
            return
        first, rest = prems[0], prems[1:]
        seen: list = []
        for q, e in self.search(first, unpacked, history, edges, False):
            for qs, e2 in self._all(rest, unpacked, history, e):
                if any(y <= e2 for y in seen):
                    continue
                seen.append(e2)
                yield [q] + qs, e2


def find_cycle_free_proof(s: Sequent) -> SearchResult:
    """Search every cut-free proof shape for one without a prehistoric cycle."""
    for _, _, f in s.formulas():
        if any(isinstance(g, (Diamond, Proof)) for _, g in positions(f)):
            raise ValueError("cycle-free search needs a ◇-free modal sequent")
    tagged, nfam = tag_root_families(s)
    eng = _CycleFree()
    for p, edges in eng.search(tagged, frozenset(), frozenset(), frozenset()):
        cert = eng.stats.as_dict()
        cert["edges"] = sorted([h, j, lab] for h, j, lab in edges)
        return SearchResult(CYCLE_FREE, p, cert)
    cert = eng.stats.as_dict()
    cert["root_families"] = nfam
    return SearchResult(NO_CYCLE_FREE, None, cert)


# ------------------------------------------------------------ G3lp search

class _G3lp:
    def __init__(self, forbid_const: bool, depth_bound: int, axiom_mode: str, candidates: list):
        self.forbid_const = forbid_const
        self.bound = depth_bound
        self.axiom_mode = axiom_mode
        self.cands = candidates
        self.stats = _Stats()

    def prove(self, seq: Sequent, unpacked: frozenset, history: frozenset, depth: int, jump: bool = True):
        if depth > self.bound:
            self.stats.bound_hits += 1
            return None
        key = (frozenset(seq.ant), frozenset(seq.suc), unpacked)
        if jump and key in history:
            self.stats.loop_hits += 1
            return None
        self.stats.nodes += 1
        history = history | {key}
        ax = _axiom(seq)
        if ax is not None:
            return ax
        inv = _invertible(seq)
        if inv is not None:
            rule, side, i = inv
            prems = []
            for ps in premises_for(rule, seq, side, i):
                q = self.prove(ps, unpacked, history, depth + 1, False)
                if q is None:
                    return None
                prems.append(q)
            return _node(rule, seq, side, i, prems)
        up = _unpack_candidate(seq, unpacked)
        if up is not None:
            rule, side, i, k = up
            q = self.prove(premises_for(rule, seq, side, i)[0], unpacked | {k}, history, depth + 1, False)
            return None if q is None else _node(rule, seq, side, i, [q])
        ant = set(seq.ant)
        suc = set(seq.suc)
        done = set()
        for i, f in enumerate(seq.suc):
            if not isinstance(f, Proof) or f in done:
                continue
            done.add(f)
            if f in ant:
                q = self.prove(Sequent((f,), (f.body,)), frozenset(), history, depth + 1)
                if q is not None:
                    return _node(TERM_R, seq, "suc", i, [q])
            if isinstance(f.term, Const) and not self.forbid_const \
                    and axioms.is_lp_axiom(f.body, self.axiom_mode):
                q = self.prove(Sequent((), (f.body,)), frozenset(), history, depth + 1)
                if q is not None:
                    return _node(CONST_R, seq, "suc", i, [q])
        for i, f in enumerate(seq.suc):
            if not isinstance(f, Proof):
                continue
            t = f.term
            if isinstance(t, Sum):
                if not (Proof(t.left, f.body) in suc and Proof(t.right, f.body) in suc):
                    q = self.prove(premises_for(SUM_R, seq, "suc", i)[0], unpacked, history, depth + 1)
                    if q is not None:
                        return _node(SUM_R, seq, "suc", i, [q])
            elif isinstance(t, Bang) and isinstance(f.body, Proof) and f.body.term == t.body:
                if f.body not in suc:
                    q = self.prove(premises_for(BANG_R, seq, "suc", i)[0], unpacked, history, depth + 1)
                    if q is not None:
                        return _node(BANG_R, seq, "suc", i, [q])
            elif isinstance(t, App):
                for c in self._app_candidates(t, f.body):
                    if Proof(t.right, c) in suc and Proof(t.left, Implies(c, f.body)) in suc:
                        continue
                    prems = premises_for(APP_R, seq, "suc", i, c)
                    q0 = self.prove(prems[0], unpacked, history, depth + 1)
                    if q0 is None:
                        continue
                    q1 = self.prove(prems[1], unpacked, history, depth + 1)
                    if q1 is not None:
                        return _node(APP_R, seq, "suc", i, [q0, q1], cut=c)
        return None

    def _app_candidates(self, t: App, b: Formula) -> list:
        out = []
        for g in self.cands:
            if isinstance(g, Proof):
                if g.term == t.right:
                    out.append(g.body)
                if g.term == t.left and isinstance(g.body, Implies) and g.body.right == b:
                    out.append(g.body.left)
        seen, uniq = set(), []
        for c in sorted(out, key=render):
            if c not in seen:
                seen.add(c)
                uniq.append(c)
        return uniq


def search_g3lp(s: Sequent, forbid_const_intro: bool = False, depth_bound: int = 64,
                axiom_mode: str = "tautology") -> SearchResult:
    """Bounded backward search in G3lp; terms are never synthesised."""
    closure: set = set()
    for _, _, f in s.formulas():
        closure |= lp_subformulas(f)
    eng = _G3lp(forbid_const_intro, depth_bound, axiom_mode,
                sorted(closure, key=render))
    p = eng.prove(s, frozenset(), frozenset(), 0)
    cert = eng.stats.as_dict()
    cert["forbid_const_intro"] = forbid_const_intro
    if p is not None:
        return SearchResult(PROVED, p, cert)
    if eng.stats.bound_hits:
        return SearchResult(BOUND, None, cert, depth_bound)
    return SearchResult(UNPROVABLE, None, cert)
