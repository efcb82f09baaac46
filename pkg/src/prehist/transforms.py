"""Proof transformations with prehistoric bookkeeping.

Before a transformation runs, every box of the input proof is tagged with
the index of its correspondence class.  Tags ride along with the formula
objects through all rewrites, so the boxes of the output still name the
input families they came from; output edges can then be compared with
input edges directly (``tag_edges``).

Premise shapes always come from :func:`proofs.schema`; the actual active
formula objects of an existing node are recovered with the checker's
matcher so tags are never lost.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .families import has_cycle, prehistoric_graph
from .proofs import (
    AND_L, AND_R, APP_R, AX, BANG_R, BOT_L, BOX_L, BOX_R, BOXCUT, CONST_R, CUT, DIA_L, DIA_R, IMP_L,
    IMP_R, NOT_L, NOT_R, OR_L, OR_R, PROOF_L, SUM_R, TERM_R, TWO_FORMULA_RULES, Principal, ProofNode,
    RuleError, Sequent, _infer_two_formula, _match_side, build_correspondence, check_node, check_proof,
    iter_nodes, premises_for, schema,
)
from .syntax import And, Box, Diamond, Formula, Implies, Not, Or, children, forgetful_formula, positions, rebuild, render, tag_signature

WEAK_RULES = {AX, BOT_L, BOX_R, DIA_L, CONST_R, TERM_R}
CLASSICAL = {NOT_L, NOT_R, AND_L, AND_R, OR_L, OR_R, IMP_L, IMP_R}
INVERTIBLE = CLASSICAL | {BOX_L, PROOF_L}
# rules whose premises repeat the principal formula as an active formula
SELF_ACTIVE = {BOX_L, PROOF_L, DIA_R, SUM_R, BANG_R, APP_R, BOXCUT}


class TransformError(RuleError):
    pass


# ------------------------------------------------------------ sequent ops

def _without(s: Sequent, side: str, i: int) -> Sequent:
    if side == "ant":
        return Sequent(s.ant[:i] + s.ant[i + 1:], s.suc)
    return Sequent(s.ant, s.suc[:i] + s.suc[i + 1:])


def _replace(s: Sequent, side: str, i: int, f: Formula) -> Sequent:
    if side == "ant":
        return Sequent(s.ant[:i] + (f,) + s.ant[i + 1:], s.suc)
    return Sequent(s.ant, s.suc[:i] + (f,) + s.suc[i + 1:])


def _find(forms, f: Formula, exclude=()) -> int | None:
    sig = tag_signature(f)
    loose = None
    for i, g in enumerate(forms):
        if i in exclude or g != f:
            continue
        if tag_signature(g) == sig:
            return i
        if loose is None:
            loose = i
    return loose


def _shift(idx, removed):
    return idx - 1 if idx is not None and removed is not None and idx > removed else idx


def _ctx_pos(s: Sequent, pside, pidx, side: str, i: int, n_ant_act: int) -> int:
    ctx = [k for k in range(len(s.side(side))) if not (pside == side and k == pidx)]
    r = ctx.index(i)
    return n_ant_act + r if side == "ant" else r


def reorder(p: ProofNode, target: Sequent) -> ProofNode:
    """Same proof with its end-sequent permuted (and re-tagged) to ``target``."""
    s = p.sequent
    if s is target:
        return p
    perms = {}
    for side in ("ant", "suc"):
        old, new = s.side(side), target.side(side)
        if len(old) != len(new):
            raise TransformError(f"reorder: {side} sizes differ ({render_seq(s)} vs {render_seq(target)})")
        used: set = set()
        perm = {}
        for i, f in enumerate(old):
            j = _find(new, f, used)
            if j is None:
                raise TransformError(f"reorder: {render(f)} missing from {render_seq(target)}")
            used.add(j)
            perm[i] = j
        perms[side] = perm
    pr = p.principal
    if pr is not None and pr.side is not None:
        pr = Principal(pr.side, perms[pr.side][pr.index], pr.cut)
    return ProofNode(p.rule, target, pr, p.premises)


def render_seq(s: Sequent) -> str:
    return ", ".join(render(f) for f in s.ant) + " => " + ", ".join(render(f) for f in s.suc)


# --------------------------------------------------- node layout helpers

@dataclass
class _Slot:
    spec: object
    real: int
    ant_act: tuple
    suc_act: tuple


def _layout(node: ProofNode):
    """Specs of a determined node with the actual active objects of each premise."""
    concl, pr, rule = node.sequent, node.principal, node.rule
    attempts = []
    if rule == CUT:
        attempts.append((schema(CUT, concl, None, None, pr.cut), [0, 1], pr.cut))
    elif rule in TWO_FORMULA_RULES:
        cands = _infer_two_formula(rule, node)
        if pr.cut is not None:
            cands = [c for c in cands if c[0] == pr.cut] or cands
        for a, k in cands:
            attempts.append((schema(rule, concl, pr.side, pr.index, a), [1, 0] if k == 0 else [0, 1], a))
    else:
        specs = schema(rule, concl, pr.side, pr.index, pr.cut)
        attempts.append((specs, list(range(len(specs))), pr.cut))
    err = None
    for specs, order, cut in attempts:
        try:
            slots = []
            for k, spec in enumerate(specs):
                real = order[k]
                ps = node.premises[real].sequent
                a_pos, _ = _match_side(ps.ant, spec.ant_act, [(i, concl.ant[i]) for i in spec.ctx_ant], "ant", real)
                s_pos, _ = _match_side(ps.suc, spec.suc_act, [(i, concl.suc[i]) for i in spec.ctx_suc], "suc", real)
                slots.append(_Slot(spec, real, tuple(ps.ant[i] for i in a_pos), tuple(ps.suc[i] for i in s_pos)))
            return slots, cut
        except RuleError as e:
            err = e
    raise TransformError(f"cannot lay out {rule} node: {err}")


def _like(slots, concl: Sequent, pside, pidx) -> list:
    out = []
    for sl in slots:
        ca = tuple(f for i, f in enumerate(concl.ant) if not (pside == "ant" and i == pidx))
        cs = tuple(f for i, f in enumerate(concl.suc) if not (pside == "suc" and i == pidx))
        out.append(Sequent(sl.ant_act + ca, cs + sl.suc_act))
    return out


def _canonical_premises(node: ProofNode, slots) -> list:
    pr = node.principal
    targets = _like(slots, node.sequent, pr.side, pr.index)
    return [reorder(node.premises[sl.real], t) for sl, t in zip(slots, targets)]


def _reapply(node: ProofNode, slots, cut, concl: Sequent, pidx, prems) -> ProofNode:
    pside = node.principal.side
    targets = _like(slots, concl, pside, pidx)
    built = tuple(reorder(q, t) for q, t in zip(prems, targets))
    return ProofNode(node.rule, concl, Principal(pside, pidx, cut), built)


def _root_ok(node: ProofNode) -> bool:
    try:
        check_node(node, ())
        return True
    except (RuleError, IndexError):
        return False


def _drop(p: ProofNode, side: str, i: int) -> ProofNode | None:
    """Remove a weakening formula of the last rule, if it is one."""
    if p.rule not in WEAK_RULES:
        return None
    pr = p.principal
    if pr is not None and pr.side == side and pr.index == i:
        return None
    if pr is not None and pr.side == side:
        pr = Principal(side, _shift(pr.index, i), pr.cut)
    node = ProofNode(p.rule, _without(p.sequent, side, i), pr, p.premises)
    return node if _root_ok(node) else None


# ------------------------------------------------------------- weakening

def weaken(p: ProofNode, f: Formula, side: str) -> ProofNode:
    """Add ``f`` to the end-sequent (appended on the left, prepended on the right)."""
    s = p.sequent
    concl = Sequent(s.ant + (f,), s.suc) if side == "ant" else Sequent(s.ant, (f,) + s.suc)
    pr = p.principal
    if pr is not None and pr.side == "suc" and side == "suc":
        pr = Principal("suc", pr.index + 1, pr.cut)
    if p.rule in WEAK_RULES:
        return ProofNode(p.rule, concl, pr, p.premises)
    slots, cut = _layout(p)
    prems = [weaken(p.premises[sl.real], f, side) for sl in slots]
    return _reapply(p, slots, cut, concl, pr.index if pr else None, prems)


def weaken_many(p: ProofNode, ant=(), suc=()) -> ProofNode:
    for f in ant:
        p = weaken(p, f, "ant")
    for f in reversed(tuple(suc)):
        p = weaken(p, f, "suc")
    return p


def weaken_to(p: ProofNode, target: Sequent) -> ProofNode:
    """Weaken ``p`` up to ``target`` (which must contain its end-sequent)."""
    extra = {}
    for side in ("ant", "suc"):
        need = list(target.side(side))
        for f in p.sequent.side(side):
            j = _find(need, f)
            if j is None:
                raise TransformError(f"weaken_to: {render(f)} not in target")
            need.pop(j)
        extra[side] = need
    return reorder(weaken_many(p, extra["ant"], extra["suc"]), target)


# ------------------------------------------------------------- inversion

def invert(p: ProofNode, rule: str, side: str, idx: int) -> list:
    """Height-preserving inversion: proofs of the premises of ``rule`` at ``(side, idx)``."""
    if rule not in INVERTIBLE:
        raise TransformError(f"{rule} is not invertible")
    s = p.sequent
    f = s.side(side)[idx]
    targets = premises_for(rule, s, side, idx)
    if rule in (BOX_L, PROOF_L):
        return [reorder(weaken(p, f.body, "ant"), targets[0])]
    pr = p.principal
    if p.rule == rule and pr.side == side and s.side(side)[pr.index] == f:
        slots, _ = _layout(p)
        return [reorder(p.premises[sl.real], t) for sl, t in zip(slots, targets)]
    if p.rule in WEAK_RULES:
        out = []
        for t in targets:
            npr = pr
            if pr is not None and pr.side is not None:
                g = s.side(pr.side)[pr.index]
                npr = Principal(pr.side, _find(t.side(pr.side), g), pr.cut)
            node = ProofNode(p.rule, t, npr, p.premises)
            if not _root_ok(node):
                raise TransformError(f"inversion through {p.rule} failed")
            out.append(node)
        return out
    slots, cut = _layout(p)
    canon = _canonical_premises(p, slots)
    invs = []
    for sl, q in zip(slots, canon):
        pos = _ctx_pos(s, pr.side, pr.index, side, idx, len(sl.ant_act))
        invs.append(invert(q, rule, side, pos))
    out = []
    for m, t in enumerate(targets):
        npidx = None
        if pr.side is not None:
            n_act = len(t.ant) - (len(s.ant) - (1 if side == "ant" else 0))
            npidx = _ctx_pos(s, side, idx, pr.side, pr.index, n_act)
        out.append(_reapply(p, slots, cut, t, npidx, [inv[m] for inv in invs]))
    return out


# ----------------------------------------------------------- contraction

def _pair(forms, f: Formula, exclude=()):
    """Two positions holding ``f``, preferring ones with equal tags."""
    idxs = [i for i, g in enumerate(forms) if g == f and i not in exclude]
    if len(idxs) < 2:
        return None
    for a in idxs:
        for b in idxs:
            if a < b and tag_signature(forms[a]) == tag_signature(forms[b]):
                return a, b
    return idxs[0], idxs[1]


def contract(p: ProofNode, side: str, i: int, j: int) -> ProofNode:
    """Merge the copies at ``i`` and ``j``; the result proves the end-sequent without ``j``."""
    s = p.sequent
    forms = s.side(side)
    if i == j or forms[i] != forms[j]:
        raise TransformError("contraction needs two copies of one formula")
    target = _without(s, side, j)
    pr = p.principal
    if p.rule in WEAK_RULES:
        q = _drop(p, side, j)
        if q is not None:
            return q
        q = _drop(p, side, i)
        if q is not None:
            return reorder(q, target)
        if p.rule in (BOX_R, DIA_L, TERM_R):
            prem = p.premises[0]
            pair = _pair(prem.sequent.side(side), forms[i])
            if pair is None:
                raise TransformError(f"contraction through {p.rule} failed")
            newprem = contract(prem, side, *pair)
            npr = Principal(pr.side, _shift(pr.index, j) if pr.side == side else pr.index, pr.cut)
            node = ProofNode(p.rule, target, npr, (newprem,))
            if not _root_ok(node):
                raise TransformError(f"contraction through {p.rule} failed")
            return node
        raise TransformError(f"contraction through {p.rule} failed")
    slots, cut = _layout(p)
    canon = _canonical_premises(p, slots)
    if not (pr.side == side and pr.index in (i, j)):
        prems = []
        for sl, q in zip(slots, canon):
            pi = _ctx_pos(s, pr.side, pr.index, side, i, len(sl.ant_act))
            pj = _ctx_pos(s, pr.side, pr.index, side, j, len(sl.ant_act))
            prems.append(contract(q, side, pi, pj))
        npidx = _shift(pr.index, j) if pr.side == side else pr.index
        return _reapply(p, slots, cut, target, npidx, prems)
    prc, oth = (i, j) if pr.index == i else (j, i)
    f = forms[prc]
    concl = _without(s, side, oth)
    prems = []
    if p.rule in SELF_ACTIVE:
        for sl, q in zip(slots, canon):
            po = _ctx_pos(s, pr.side, pr.index, side, oth, len(sl.ant_act))
            qs = q.sequent.side(side)
            act = len(sl.ant_act) - 1 if side == "ant" else len(qs) - 1
            if qs[act] != f:
                raise TransformError(f"unexpected premise layout for {p.rule}")
            prems.append(contract(q, side, act, po))
    elif p.rule in CLASSICAL:
        for k, (sl, q) in enumerate(zip(slots, canon)):
            po = _ctx_pos(s, pr.side, pr.index, side, oth, len(sl.ant_act))
            r = invert(q, p.rule, side, po)[k]
            for g in sl.ant_act:
                r = contract(r, "ant", *_pair(r.sequent.ant, g))
            for g in sl.suc_act:
                r = contract(r, "suc", *_pair(r.sequent.suc, g))
            prems.append(r)
    else:
        raise TransformError(f"contraction through {p.rule} is not supported")
    out = _reapply(p, slots, cut, concl, _shift(prc, oth), prems)
    return reorder(out, target)


def contract_formula(p: ProofNode, f: Formula, side: str) -> ProofNode:
    pair = _pair(p.sequent.side(side), f)
    if pair is None:
        raise TransformError(f"formula {render(f)} does not occur twice on the {side} side")
    return contract(p, side, *pair)


def _contract_into(p: ProofNode, ant_pool: tuple) -> ProofNode:
    """Contract antecedent duplicates until the antecedent fits into ``ant_pool``."""
    while True:
        have = Counter(p.sequent.ant)
        room = Counter(ant_pool)
        over = next((f for f in p.sequent.ant if have[f] > room[f]), None)
        if over is None:
            return p
        pair = _pair(p.sequent.ant, over)
        if pair is None:
            raise TransformError(f"{render(over)} is not available in the conclusion")
        p = contract(p, "ant", *pair)


# ------------------------------------------------------- cut elimination

def _cut(pl: ProofNode, il: int, pr_: ProofNode, ir: int) -> ProofNode:
    """Cut-free proof of ``pl``'s end-sequent without ``suc[il]`` (both inputs cut-free)."""
    sl, sr = pl.sequent, pr_.sequent
    a = sl.suc[il]
    if isinstance(a, Diamond):
        raise TransformError("cut elimination does not handle ◇ cut formulas")
    target = _without(sl, "suc", il)
    q = _drop(pl, "suc", il)
    if q is not None:
        return q
    q = _drop(pr_, "ant", ir)
    if q is not None:
        return reorder(q, target)
    if pl.rule == AX:
        other = _find(sr.ant, a, {ir})
        return reorder(contract(pr_, "ant", other, ir), target)
    if pr_.rule == AX:
        other = _find(sl.suc, a, {il})
        return contract(pl, "suc", other, il)
    ppr, lpr = pr_.principal, pl.principal
    # push into the right proof
    if pr_.rule in INVERTIBLE and not (ppr.side == "ant" and ppr.index == ir):
        c = sr.side(ppr.side)[ppr.index]
        cl = _find(sl.side(ppr.side), c, {il} if ppr.side == "suc" else ())
        inv = invert(pl, pr_.rule, ppr.side, cl)
        slots, cut = _layout(pr_)
        canon = _canonical_premises(pr_, slots)
        res = []
        for k, (slt, q) in enumerate(zip(slots, canon)):
            ar = _ctx_pos(sr, ppr.side, ppr.index, "ant", ir, len(slt.ant_act))
            ql = inv[k]
            al = _ctx_pos(sl, ppr.side, cl, "suc", il, len(ql.sequent.ant) - (len(sl.ant) - (ppr.side == "ant")))
            res.append(_cut(ql, al, q, ar))
        npidx = _shift(cl, il) if ppr.side == "suc" else cl
        return _reapply(pr_, slots, cut, target, npidx, res)
    # push into the left proof
    if pl.rule in INVERTIBLE and not (lpr.side == "suc" and lpr.index == il):
        c = sl.side(lpr.side)[lpr.index]
        cr = _find(sr.side(lpr.side), c, {ir} if lpr.side == "ant" else ())
        inv = invert(pr_, pl.rule, lpr.side, cr)
        slots, cut = _layout(pl)
        canon = _canonical_premises(pl, slots)
        res = []
        for k, (slt, q) in enumerate(zip(slots, canon)):
            al = _ctx_pos(sl, lpr.side, lpr.index, "suc", il, len(slt.ant_act))
            qr = inv[k]
            ar = _ctx_pos(sr, lpr.side, cr, "ant", ir, len(qr.sequent.ant) - (len(sr.ant) - (lpr.side == "ant")))
            res.append(_cut(q, al, qr, ar))
        npidx = _shift(lpr.index, il) if lpr.side == "suc" else lpr.index
        return _reapply(pl, slots, cut, target, npidx, res)
    if pr_.rule == BOX_R and pl.rule == BOX_R:
        return _cut_box_key(pl, il, pr_, ir, target)
    if pl.rule in CLASSICAL | {BOX_R} and pr_.rule in INVERTIBLE:
        return _cut_principal(pl, il, pr_, ir, target)
    raise TransformError(f"no cut reduction for {pl.rule} against {pr_.rule}")


def _cut_box_key(pl, il, pr_, ir, target):
    """Both last rules are (⊃□); the cut formula is principal on the left."""
    a = pl.sequent.suc[il]
    tl, tr = pl.premises[0], pr_.premises[0]
    ja = _find(tr.sequent.ant, a)
    if ja is None or len(tr.sequent.suc) != 1 or len(tl.sequent.suc) != 1:
        raise TransformError("unexpected (⊃□) premise shape in the key case")
    gl = tl.sequent.ant
    gr = tr.sequent.ant[:ja] + tr.sequent.ant[ja + 1:]
    b = tr.sequent.suc[0]
    left = ProofNode(BOX_R, Sequent(gr + gl, (b, a)), Principal("suc", 1), (tl,))
    right = weaken_many(tr, gl)
    d = _cut(left, 1, right, ja)
    d = _contract_into(d, target.ant)
    box_b = pr_.sequent.suc[pr_.principal.index]
    node = ProofNode(BOX_R, target, Principal("suc", _find(target.suc, box_b)), (d,))
    if not _root_ok(node):
        raise TransformError("key case produced an invalid (⊃□)")
    return node


def _cut_principal(pl, il, pr_, ir, target):
    sl, sr = pl.sequent, pr_.sequent
    a = sl.suc[il]
    if isinstance(a, Box):
        if pl.rule != BOX_R or pr_.rule != BOX_L:
            raise TransformError("box cut formula must be principal in (⊃□) and (□⊃)")
        r1 = reorder(pr_.premises[0], premises_for(BOX_L, sr, "ant", ir)[0])
        x = _cut(weaken(pl, a.body, "ant"), il, r1, 1)
        w = weaken_to(pl.premises[0], Sequent(target.ant, target.suc + (a.body,)))
        y = _cut(w, len(w.sequent.suc) - 1, x, len(x.sequent.ant) - 1)
        return reorder(y, target)
    l_prems = [reorder(q, t) for q, t in zip(pl.premises, premises_for(pl.rule, sl, "suc", il))]
    r_prems = [reorder(q, t) for q, t in zip(pr_.premises, premises_for(pr_.rule, sr, "ant", ir))]
    if isinstance(a, Implies) and (pl.rule, pr_.rule) == (IMP_R, IMP_L):
        l1, (r1, r2) = l_prems[0], r_prems
        r1w = weaken(r1, a.right, "suc")
        x = _cut(r1w, len(r1w.sequent.suc) - 1, l1, 0)
        y = _cut(x, 0, r2, 0)
    elif isinstance(a, Not) and (pl.rule, pr_.rule) == (NOT_R, NOT_L):
        y = _cut(r_prems[0], len(r_prems[0].sequent.suc) - 1, l_prems[0], 0)
    elif isinstance(a, And) and (pl.rule, pr_.rule) == (AND_R, AND_L):
        l1, l2 = l_prems
        l1w = weaken(l1, a.right, "ant")
        x = _cut(l1w, len(l1w.sequent.suc) - 1, r_prems[0], 0)
        y = _cut(l2, len(l2.sequent.suc) - 1, x, len(x.sequent.ant) - 1)
    elif isinstance(a, Or) and (pl.rule, pr_.rule) == (OR_R, OR_L):
        l1 = l_prems[0]
        r1, r2 = r_prems
        r1w = weaken(r1, a.right, "suc")
        x = _cut(l1, len(l1.sequent.suc) - 2, r1w, 0)
        y = _cut(x, len(x.sequent.suc) - 1, r2, 0)
    else:
        raise TransformError(f"no principal reduction for {pl.rule} against {pr_.rule}")
    return reorder(y, target)


def _boxcut(pl, ia, ibl, pr_, iab, ibr) -> ProofNode:
    """Proof of ``pl``'s end-sequent without ``□A`` (both inputs cut-free)."""
    sl, sr = pl.sequent, pr_.sequent
    target = _without(sl, "suc", ia)
    q = _drop(pl, "suc", ia)
    if q is not None:
        return q
    q = _drop(pr_, "suc", iab)
    if q is not None:
        return reorder(q, target)
    lpr, rpr = pl.principal, pr_.principal
    for this, other, ithis, ib_this, iother, ib_other, is_left in (
            (pl, pr_, ia, ibl, iab, ibr, True), (pr_, pl, iab, ibr, ia, ibl, False)):
        tpr = this.principal
        if this.rule in INVERTIBLE and not (tpr.side == "suc" and tpr.index == ithis):
            st, so = this.sequent, other.sequent
            c = st.side(tpr.side)[tpr.index]
            excl = {iother, ib_other} if tpr.side == "suc" else set()
            co = _find(so.side(tpr.side), c, excl)
            inv = invert(other, this.rule, tpr.side, co)
            slots, cut = _layout(this)
            canon = _canonical_premises(this, slots)
            res = []
            for k, (slt, qt) in enumerate(zip(slots, canon)):
                n_t = len(slt.ant_act)
                n_o = len(inv[k].sequent.ant) - (len(so.ant) - (tpr.side == "ant"))
                a_t = _ctx_pos(st, tpr.side, tpr.index, "suc", ithis, n_t)
                b_t = _ctx_pos(st, tpr.side, tpr.index, "suc", ib_this, n_t)
                a_o = _ctx_pos(so, tpr.side, co, "suc", iother, n_o)
                b_o = _ctx_pos(so, tpr.side, co, "suc", ib_other, n_o)
                if is_left:
                    res.append(_boxcut(qt, a_t, b_t, inv[k], a_o, b_o))
                else:
                    sub = _boxcut(inv[k], a_o, b_o, qt, a_t, b_t)
                    res.append(sub)
            if is_left:
                npidx = _shift(tpr.index, ia) if tpr.side == "suc" else tpr.index
                return _reapply(this, slots, cut, target, npidx, res)
            # rebuild on the right proof's layout, then drop □(A→B) positions via the target
            concl = _without(sr, "suc", iab)
            npidx = _shift(tpr.index, iab) if tpr.side == "suc" else tpr.index
            return reorder(_reapply(this, slots, cut, concl, npidx, res), target)
    if pl.rule == BOX_R and pr_.rule == BOX_R and lpr.index == ia and rpr.index == iab:
        tl, tr = pl.premises[0], pr_.premises[0]
        if len(tl.sequent.suc) != 1 or len(tr.sequent.suc) != 1:
            raise TransformError("unexpected (⊃□) premise shape")
        gl, gr = tl.sequent.ant, tr.sequent.ant
        tr2 = invert(tr, IMP_R, "suc", 0)[0]  # A, □Γ_R ⊃ B
        b = tr2.sequent.suc[-1]
        left = weaken_many(tl, gr, (b,))
        right = weaken_many(tr2, gl)
        d = _cut(left, 1, right, 0)
        d = _contract_into(d, target.ant)
        node = ProofNode(BOX_R, target, Principal("suc", _shift(ibl, ia)), (d,))
        if not _root_ok(node):
            raise TransformError("□Cut principal case produced an invalid (⊃□)")
        return node
    raise TransformError(f"no □Cut reduction for {pl.rule} against {pr_.rule}")


def _eliminate_node(p: ProofNode) -> ProofNode:
    """Cut-free proof of a Cut/□Cut node whose premises are already cut-free."""
    slots, a = _layout(p)
    if p.rule == CUT:
        l, r = (p.premises[sl.real] for sl in slots)
        il = _find(l.sequent.suc, slots[0].suc_act[0])
        ir = _find(r.sequent.ant, slots[1].ant_act[0])
        out = _cut(l, il, r, ir)
        return reorder(out, p.sequent)
    l, r = (p.premises[sl.real] for sl in slots)
    box_a, box_b = slots[0].suc_act
    box_ab, box_b2 = slots[1].suc_act
    ibl = len(l.sequent.suc) - 1 - l.sequent.suc[::-1].index(box_b) if box_b in l.sequent.suc else None
    ia = _find(l.sequent.suc, box_a, {ibl})
    ibr = len(r.sequent.suc) - 1 - r.sequent.suc[::-1].index(box_b2)
    iab = _find(r.sequent.suc, box_ab, {ibr})
    out = _boxcut(l, ia, ibl, r, iab, ibr)
    return reorder(out, p.sequent)


def cut_free(p: ProofNode) -> ProofNode:
    """Eliminate every Cut and □Cut, topmost first."""
    prems = tuple(cut_free(q) for q in p.premises)
    node = p if all(a is b for a, b in zip(prems, p.premises)) else ProofNode(p.rule, p.sequent, p.principal, prems)
    if node.rule in (CUT, BOXCUT):
        return _eliminate_node(node)
    return node


# ------------------------------------------------------------ □-doubling

def double_box(p: ProofNode, idx: int, new: Formula | None = None) -> ProofNode:
    """Replace ``□A`` at ``suc[idx]`` by ``□□A`` (or by ``new``, a tagged copy of it)."""
    s = p.sequent
    f = s.suc[idx]
    if not isinstance(f, Box):
        raise TransformError("double_box needs a boxed succedent formula")
    new = Box(f) if new is None else new
    if not (isinstance(new, Box) and new.body == f):
        raise TransformError("replacement must be □ of the original formula")
    target = _replace(s, "suc", idx, new)
    pr = p.principal
    is_principal = pr is not None and pr.side == "suc" and pr.index == idx
    if p.rule in WEAK_RULES and not is_principal:
        node = ProofNode(p.rule, target, pr, p.premises)
        if _root_ok(node):
            return node
    if is_principal:
        if p.rule == BOX_R:
            q = p.premises[0]
            ps = q.sequent
            inner = ProofNode(BOX_R, Sequent(ps.ant, ps.suc[:-1] + (new.body,)), Principal("suc", len(ps.suc) - 1), (q,))
            return ProofNode(BOX_R, target, Principal("suc", idx), (inner,))
        if p.rule == BOXCUT:
            return double_box(reorder(cut_free(p), s), idx, new)
        raise TransformError(f"double_box cannot handle principal rule {p.rule}")
    slots, cut = _layout(p)
    canon = _canonical_premises(p, slots)
    prems = [double_box(q, _ctx_pos(s, pr.side, pr.index, "suc", idx, len(sl.ant_act)), new)
             for sl, q in zip(slots, canon)]
    return _reapply(p, slots, cut, target, pr.index, prems)


# ---------------------------------------------------- tagging and graphs

def tag_by_class(p: ProofNode, corr) -> ProofNode:
    """Copy of ``p`` whose boxes are tagged with their correspondence class."""
    def fml(addr, side, i, f):
        def go(g, path):
            kids = tuple(go(c, path + (n,)) for n, c in enumerate(children(g)))
            if isinstance(g, Box):
                return Box(kids[0], corr.class_of[(addr, side, i, path)])
            return rebuild(g, kids) if kids else g
        return go(f, ())

    def walk(addr, n):
        s = n.sequent
        seq = Sequent(tuple(fml(addr, "ant", i, f) for i, f in enumerate(s.ant)),
                      tuple(fml(addr, "suc", i, f) for i, f in enumerate(s.suc)))
        return ProofNode(n.rule, seq, n.principal, tuple(walk(addr + (k,), q) for k, q in enumerate(n.premises)))
    return walk((), p)


def tag_edges(p: ProofNode) -> set:
    """Prehistoric edges ``(h, j, label)`` read off box tags at every (⊃□)."""
    out = set()
    for addr, n in iter_nodes(p):
        if n.rule != BOX_R:
            continue
        j = n.sequent.suc[n.principal.index].tag
        for side, _, f in n.premises[0].sequent.formulas():
            for _, g in positions(f):
                if isinstance(g, Box) and g.tag is not None and j is not None:
                    out.add((g.tag, j, "L" if side == "ant" else "R"))
    return out


def _unlabelled(edges) -> set:
    return {(h, j) for h, j, *_ in edges}


def _cyclic(pairs) -> bool:
    adj: dict = {}
    for h, j in pairs:
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


@dataclass
class TransformReport:
    """Output proof plus the before/after prehistoric comparison.

    ``new_edges`` lists ``(i, j, mediators)``: an output relation between
    input families ``i`` and ``j`` that the input lacks, with the cut
    families ``k`` such that ``i ≺ k ≺ j`` in the input.
    """

    output: ProofNode
    input: ProofNode
    input_graph: object
    output_graph: object
    input_edges: set
    output_edges: set
    new_edges: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    input_cyclic: bool = False
    output_cyclic: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        from .proofs import proof_to_json
        names = self.input_graph.families

        def nm(k):
            return names[k].name if isinstance(k, int) and 0 <= k < len(names) else str(k)
        return {
            "proof": proof_to_json(self.output),
            "input_graph": self.input_graph.to_json(),
            "output_graph": self.output_graph.to_json(),
            "new_edges": [{"from": nm(i), "to": nm(j), "via": [nm(k) for k in ks]} for i, j, ks in self.new_edges],
            "violations": list(self.violations),
            "input_cyclic": self.input_cyclic,
            "output_cyclic": self.output_cyclic,
        }


def _report(inp: ProofNode, out: ProofNode, corr, mediating: set, strict_no_new: bool = False) -> TransformReport:
    g_in = prehistoric_graph(inp, "all-box")
    g_out = prehistoric_graph(out, "all-box")
    e_in = _unlabelled(g_in.edges)
    e_tag = _unlabelled(tag_edges(out))
    new, viol = [], []
    for h, j in sorted(e_tag - e_in):
        ks = sorted(k for k in mediating if (h, k) in e_in and (k, j) in e_in)
        new.append((h, j, ks))
        if strict_no_new or not ks:
            viol.append(f"new relation {g_in.families[h].name} ≺ {g_in.families[j].name} without a mediating cut family")
    cyc_in = _cyclic(e_in)
    cyc_out = has_cycle(g_out) or _cyclic(e_tag)
    if cyc_out and not cyc_in:
        viol.append("output has a prehistoric cycle although the input has none")
    return TransformReport(out, inp, g_in, g_out, e_in, e_tag, new, viol, cyc_in, cyc_out)


def _prepare(p: ProofNode, variant: str):
    rep = check_proof(p, variant)
    rep.raise_if_invalid()
    corr = build_correspondence(p, rep)
    return tag_by_class(p, corr), corr


def _cut_classes(corr, addr_side_idx) -> set:
    out = set()
    for (addr, side, i) in addr_side_idx:
        for o, k in corr.class_of.items():
            if o[0] == addr and o[1] == side and o[2] == i:
                out.add(k)
    return out


def eliminate_cut(pl: ProofNode, pr_: ProofNode, cut: Formula | None = None) -> TransformReport:
    """Cut-free proof of ``Γ ⊃ Δ`` from proofs of ``Γ ⊃ Δ, A`` and ``A, Γ ⊃ Δ``."""
    sl, sr = pl.sequent, pr_.sequent
    cands = [cut] if cut is not None else list(dict.fromkeys(reversed(sl.suc)))
    for a in cands:
        il = len(sl.suc) - 1 - sl.suc[::-1].index(a) if a in sl.suc else None
        ir = _find(sr.ant, a)
        if il is None or ir is None:
            continue
        if _without(sl, "suc", il).same_multiset(_without(sr, "ant", ir)):
            break
    else:
        raise TransformError("end-sequents are not of the form Γ ⊃ Δ, A and A, Γ ⊃ Δ")
    concl = _without(sl, "suc", il)
    l0 = reorder(pl, Sequent(concl.ant, concl.suc + (a,)))
    r0 = reorder(pr_, Sequent((a,) + concl.ant, concl.suc))
    node = ProofNode(CUT, concl, Principal(cut=a), (l0, r0))
    tagged, corr = _prepare(node, "g3s+cuts")
    out = cut_free(tagged)
    k = _cut_classes(corr, [((0,), "suc", len(concl.suc)), ((1,), "ant", 0)])
    return _report(tagged, out, corr, k)


def eliminate_boxcut(pl: ProofNode, pr_: ProofNode, a: Formula | None = None) -> TransformReport:
    """Proof of ``Γ ⊃ Δ, □B`` from proofs of ``Γ ⊃ Δ, □A, □B`` and ``Γ ⊃ Δ, □(A→B), □B``."""
    sl, sr = pl.sequent, pr_.sequent
    found = None
    for iab, g in enumerate(sr.suc):
        if not (isinstance(g, Box) and isinstance(g.body, Implies)):
            continue
        if a is not None and g.body.left != a:
            continue
        box_a, box_b = Box(g.body.left), Box(g.body.right)
        ia = _find(sl.suc, box_a)
        if ia is None:
            continue
        ibl = _find(sl.suc, box_b, {ia})
        ibr = _find(sr.suc, box_b, {iab})
        if ibl is None or ibr is None:
            continue
        if _without(sl, "suc", ia).same_multiset(_without(sr, "suc", iab)):
            found = (ia, ibl, iab, ibr, g.body.left)
            break
    if found is None:
        raise TransformError("end-sequents are not of the form Γ ⊃ Δ, □A, □B and Γ ⊃ Δ, □(A→B), □B")
    ia, ibl, iab, ibr, a = found
    concl = _without(sl, "suc", ia)
    node = ProofNode(BOXCUT, concl, Principal("suc", _shift(ibl, ia), a), (pl, pr_))
    tagged, corr = _prepare(node, "g3s+cuts")
    out = cut_free(tagged)
    k = _cut_classes(corr, [((0,), "suc", ia), ((1,), "suc", iab)])
    return _report(tagged, out, corr, k)


def eliminate_all(p: ProofNode) -> TransformReport:
    """Remove every Cut and □Cut from a validated proof."""
    tagged, corr = _prepare(p, "g3s+cuts")
    out = cut_free(tagged)
    k = set()
    for addr, n in iter_nodes(p):
        if n.rule == CUT:
            k |= _cut_classes(corr, [(addr + (0,), "suc", i) for i in range(len(n.premises[0].sequent.suc))])
        if n.rule == BOXCUT:
            k |= _cut_classes(corr, [(addr + (r,), "suc", i) for r in (0, 1)
                                     for i in range(len(n.premises[r].sequent.suc))])
    return _report(tagged, out, corr, k)


def structural_report(p: ProofNode, op, variant: str = "g3s") -> TransformReport:
    """Run a structural transform ``op(tagged_proof)`` and demand no new relations."""
    tagged, corr = _prepare(p, variant)
    out = op(tagged)
    return _report(tagged, out, corr, set(), strict_no_new=True)


# -------------------------------------------------- forgetful projection

@dataclass
class Projection:
    proof: ProofNode
    family_map: dict  # output □ class -> source term class
    multi_valued: dict  # output class -> set of term classes, when not unique
    source_classes: int

    @property
    def single_valued(self) -> bool:
        return not self.multi_valued


def _project(p: ProofNode, corr) -> ProofNode:
    def fml(addr, side, i, f):
        return forgetful_formula(f, tag=lambda path: corr.class_of[(addr, side, i, path)])

    def seq(addr, s):
        return Sequent(tuple(fml(addr, "ant", i, f) for i, f in enumerate(s.ant)),
                       tuple(fml(addr, "suc", i, f) for i, f in enumerate(s.suc)))

    def go(addr, n):
        s0 = seq(addr, n.sequent)
        r, pr = n.rule, n.principal
        kids = [go(addr + (k,), q) for k, q in enumerate(n.premises)]
        if r in (AX, BOT_L):
            return ProofNode(r, s0, pr)
        if r in CLASSICAL:
            return ProofNode(r, s0, pr, kids)
        if r == PROOF_L:
            return ProofNode(BOX_L, s0, pr, kids)
        if r in (CONST_R, TERM_R):
            return ProofNode(BOX_R, s0, Principal("suc", pr.index), kids)
        if r == APP_R:
            _, a = _layout(n)
            return ProofNode(BOXCUT, s0, Principal("suc", pr.index, forgetful_formula(a)), kids)
        slots, _ = _layout(n)
        q = kids[0]
        src = n.premises[slots[0].real].sequent.suc
        if r == SUM_R:
            s_a, t_a, st_a = slots[0].suc_act
            i_st = _index_of_obj(src, st_a)
            i_s = _index_of_obj(src, s_a, {i_st})
            q = contract(q, "suc", i_st, i_s)
            i_st = _shift(i_st, i_s)
            src2 = src[:i_s] + src[i_s + 1:]
            i_t = _index_of_obj(src2, t_a, {i_st})
            q = contract(q, "suc", i_st, i_t)
            return reorder(q, s0)
        if r == BANG_R:
            t_a, bang = slots[0].suc_act
            i_b = _index_of_obj(src, bang)
            i_t = _index_of_obj(src, t_a, {i_b})
            new = s0.suc[pr.index]
            q = double_box(q, i_t, new)
            q = contract(q, "suc", i_b, i_t)
            return reorder(q, s0)
        raise TransformError(f"cannot project rule {r}")
    return go((), p)


def _index_of_obj(forms, f, exclude=()):
    for i, g in enumerate(forms):
        if g is f and i not in exclude:
            return i
    return _find(forms, f, set(exclude))


def project_proof(p: ProofNode) -> Projection:
    """Forgetful projection of a G3lp proof into G3s + □Cut, with the family map."""
    rep = check_proof(p, "g3lp")
    rep.raise_if_invalid()
    corr = build_correspondence(p, rep)
    out = _project(p, corr)
    orep = check_proof(out, "g3s+boxcut")
    orep.raise_if_invalid()
    ocorr = build_correspondence(out, orep)
    fmap, multi = {}, {}
    for k, members in enumerate(ocorr.classes):
        tags = {ocorr.formula_at(o).tag for o in members}
        if len(tags) == 1:
            fmap[k] = next(iter(tags))
        else:
            multi[k] = tags
            fmap[k] = min(t for t in tags if t is not None) if any(t is not None for t in tags) else None
    return Projection(out, fmap, multi, len(corr.classes))


def projection_edge_check(p: ProofNode, proj: Projection) -> list:
    """Output edges ``i ≺ j`` whose images are neither equal nor related in the source."""
    g_src = prehistoric_graph(p, "lp-term")
    src = _unlabelled(g_src.edges)
    g_out = prehistoric_graph(proj.proof, "all-box")
    bad = []
    for h, j, _ in sorted(g_out.edges):
        a, b = proj.family_map.get(h), proj.family_map.get(j)
        if a is None or b is None or not (a == b or (a, b) in src):
            bad.append((h, j, a, b))
    return bad
