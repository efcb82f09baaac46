"""Acceptance checks shared by ``prehist selftest`` and the test-suite.

Each check returns a :class:`Outcome`; ``findings`` collects reportable
property violations (with the smallest counterexample first) that do not
by themselves fail the check.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from importlib import resources

from . import corpus as C
from . import transforms as T
from .families import classify_and_annotate, find_cycle, has_cycle, prehistoric_graph
from .lp_analysis import (
    classify_selfref, extract_selfref_chain, inputs_of, realization, realize_proof, term_cycle, verify_witness,
)
from .proofs import check_proof, parse_sequent, proof_from_json, render_sequent, same_proof
from .prover import NO_CYCLE_FREE, PROVED, decide_g3s, find_cycle_free_proof, search_g3lp
from .semantics import KripkeModel, eval as kripke_eval, s4_models
from .syntax import And, Atom, Bottom, Formula, Implies, Not, Or, Proof, forgetful_formula, parse, render

COUNTER_MODAL = "=> [](P & ~[]P -> P) -> ~[](P & ~[]P)"
COUNTER_LP = "=> y:(P & ~(y*x):P -> P) -> ~x:(P & ~(y*x):P)"
FIXTURES = {
    "g3s_example": "g3s",
    "g3lp_example": "g3lp",
    "g3lp_projection": "g3s+boxcut",
}
# the realization column is the annotated G3s proof with every sequent realized
EXAMPLE_REALIZATION = {"⊟0": "x", "⊞0": "t*x"}


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    seconds: float
    limit: float | None = None
    detail: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lim = f", limit {self.limit:g} s" if self.limit is not None else ""
        extra = f"; {len(self.findings)} finding(s)" if self.findings else ""
        return f"[{status}] criterion {self.number}: {self.title} ({self.seconds:.3f} s{lim}){extra}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 4), "limit": self.limit, "detail": self.detail,
                "findings": self.findings}


def fixture(name: str):
    import json
    text = resources.files("prehist").joinpath("fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return proof_from_json(json.loads(text))


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


# ----------------------------------------------------------------- 1

def criterion_1() -> Outcome:
    def run():
        d = {}
        for name, variant in FIXTURES.items():
            d[f"{name} validates as {variant}"] = check_proof(fixture(name), variant).ok
        ann = classify_and_annotate(fixture("g3s_example"))
        realized = realize_proof(ann, realization(EXAMPLE_REALIZATION))
        d["g3s_realization is the realized proof"] = same_proof(realized, fixture("g3s_realization"))
        d["families"] = sorted(f.name for f in ann.families)
        g = prehistoric_graph(ann, "g3s-principal")
        d["edges"] = sorted(g.named_edges())
        cyc = find_cycle(g, left_only=True)
        d["left cycle"] = [f.name for f in cyc] if cyc else None
        return d
    d, sec = _timed(run)
    ok = (all(v for k, v in d.items() if k.endswith(tuple(FIXTURES.values()) + ("realized proof",)))
          and d["families"] == ["n0", "p0"] and d["edges"] == [("p0", "p0", "L")] and d["left cycle"] == ["p0"])
    d["edges"] = [list(e) for e in d["edges"]]
    return Outcome(1, "fixture encodings validate; families {n0, p0}; graph p0 ≺_L p0; left cycle", ok and sec < 1,
                   sec, 1, d)


# ----------------------------------------------------------------- 2

def criterion_2() -> Outcome:
    s = parse_sequent(COUNTER_MODAL)

    def run():
        return find_cycle_free_proof(s), decide_g3s(s)
    (cf, plain), sec = _timed(run)
    d = {"cycle_free": cf.kind, "plain": plain.kind, "certificate": cf.certificate,
         "plain_proof_valid": plain.proof is not None and check_proof(plain.proof, "g3s").ok}
    ok = cf.kind == NO_CYCLE_FREE and plain.kind == PROVED and d["plain_proof_valid"]
    return Outcome(2, "cycle-free search refutes, plain search proves the modal counterexample", ok and sec < 10,
                   sec, 10, d)


# ----------------------------------------------------------------- 3

def criterion_3() -> Outcome:
    s = parse_sequent(COUNTER_LP, language="lp")

    def run():
        res = search_g3lp(s, forbid_const_intro=True)
        d = {"result": res.kind}
        if res.proof is None:
            return d, False
        p = res.proof
        d["valid"] = check_proof(p, "g3lp").ok
        ins = inputs_of(p)
        d["inputs"] = [render(f) for f in ins.formulas]
        d["cs"] = [render(f) for f in ins.cs.sorted()]
        modal = parse_sequent(COUNTER_MODAL).suc[0]
        d["projection_matches"] = forgetful_formula(s.suc[0]) == modal
        cyc = term_cycle(p)
        d["term_cycle"] = [f.name for f in cyc] if cyc else None
        chain = extract_selfref_chain(p, cyc) if cyc else None
        d["chain"] = chain.to_json() if chain else None
        ok = (d["valid"] and not d["cs"] and d["projection_matches"] and cyc is not None
              and chain.self_referential and verify_witness(chain))
        return d, ok
    (d, ok), sec = _timed(run)
    return Outcome(3, "G3lp proves the LP counterexample without constants; cyclic, IN self-referential",
                   ok and sec < 10, sec, 10, d)


# ----------------------------------------------------------------- 4

def criterion_4() -> Outcome:
    m = KripkeModel({"w"}, {("w", "w")}, {"P": set()})
    f1 = parse("[](P & ~[]P -> P) -> P")
    f2 = parse("[](P & ~[]P -> P)")
    reps = 1000
    t = time.perf_counter()
    for _ in range(reps):
        v1, v2 = kripke_eval(m, "w", f1), kripke_eval(m, "w", f2)
    sec = (time.perf_counter() - t) / reps
    d = {"[](P & ~[]P -> P) -> P": v1, "[](P & ~[]P -> P)": v2, "seconds_per_pair": sec}
    return Outcome(4, "singleton reflexive model with empty valuation", (v1, v2) == (False, True) and sec < 1e-3,
                   sec, 1e-3, d)


# ----------------------------------------------------------------- 5

def criterion_5(n: int = 500, seed: int = 0) -> Outcome:
    def run():
        insts = C.cut_corpus(n, seed=seed)
        invalid, findings, new_edges = [], [], 0
        for inst in insts:
            try:
                rep = T.eliminate_cut(inst.left, inst.right, inst.cut)
            except Exception as e:  # noqa: BLE001 - reported as a failure below
                invalid.append({"input": render_sequent(inst.proof.sequent), "error": str(e)})
                continue
            good = check_proof(rep.output, "g3s").ok and rep.output.sequent.same_multiset(inst.proof.sequent)
            if not good:
                invalid.append({"input": render_sequent(inst.proof.sequent), "error": "invalid output"})
            new_edges += len(rep.new_edges)
            if rep.violations:
                findings.append((inst.size, {"left": render_sequent(inst.left.sequent),
                                             "right": render_sequent(inst.right.sequent),
                                             "cut": render(inst.cut), "violations": rep.violations}))
        findings.sort(key=lambda x: x[0])
        return len(insts), invalid, [f for _, f in findings], new_edges
    (count, invalid, findings, new_edges), sec = _timed(run)
    d = {"instances": count, "invalid": invalid[:5], "new_edges_reported": new_edges,
         "violations": len(findings)}
    return Outcome(5, f"cut elimination on {count} generated proofs", count >= n and not invalid, sec, None, d,
                   findings)


# ----------------------------------------------------------------- 6

def criterion_6(n: int = 200, seed: int = 2) -> Outcome:
    def run():
        proofs = C.g3lp_corpus(n, seed=seed)
        bad, stats = [], {"with_boxcut": 0, "cycle_free": 0}
        for text, p in proofs:
            try:
                proj = T.project_proof(p)
            except Exception as e:  # noqa: BLE001
                bad.append({"sequent": text, "error": f"projection failed: {e}"})
                continue
            want = parse_sequent(text, language="lp")
            want = type(want)(tuple(map(forgetful_formula, want.ant)), tuple(map(forgetful_formula, want.suc)))
            if not (check_proof(proj.proof, "g3s+boxcut").ok and proj.proof.sequent.same_multiset(want)):
                bad.append({"sequent": text, "error": "projection invalid"})
            if not proj.single_valued or any(v is None for v in proj.family_map.values()):
                bad.append({"sequent": text, "error": "family map not total and single-valued"})
            if T.projection_edge_check(p, proj):
                bad.append({"sequent": text, "error": "edge mapping violated"})
            stats["with_boxcut"] += any(n_.rule == "□Cut" for _, n_ in _nodes(proj.proof))
            if has_cycle(prehistoric_graph(proj.proof, "all-box")):
                continue
            stats["cycle_free"] += 1
            rep = T.eliminate_all(proj.proof)
            if not check_proof(rep.output, "g3s").ok or rep.output_cyclic:
                bad.append({"sequent": text, "error": "cut elimination lost cycle-freeness or validity"})
        return len(proofs), bad, stats
    (count, bad, stats), sec = _timed(run)
    d = {"proofs": count, "failures": bad[:5], **stats}
    return Outcome(6, f"projection and □Cut/Cut elimination on {count} G3lp proofs", count >= n and not bad, sec,
                   None, d)


def _nodes(p):
    from .proofs import iter_nodes
    return iter_nodes(p)


# ----------------------------------------------------------------- 7

def criterion_7(n: int = 200, seed: int = 2) -> Outcome:
    def run():
        proofs = C.g3lp_corpus(n, seed=seed)
        extra = [("fixture g3lp_example", fixture("g3lp_example"))]
        res = search_g3lp(parse_sequent(COUNTER_LP, language="lp"), forbid_const_intro=True)
        extra.append(("counterexample", res.proof))
        bad, cyclic = [], 0
        for text, p in list(proofs) + extra:
            cyc = term_cycle(p)
            verdict = classify_selfref(inputs_of(p))
            if cyc is None:
                continue
            cyclic += 1
            if not verdict.self_referential:
                bad.append({"sequent": text, "error": "cyclic graph with non-self-referential inputs"})
            try:
                chain = extract_selfref_chain(p, cyc)
                if not (chain.self_referential and verify_witness(chain)):
                    bad.append({"sequent": text, "error": "extracted chain is not self-referential"})
            except Exception as e:  # noqa: BLE001
                bad.append({"sequent": text, "error": f"extraction failed: {e}"})
        return len(proofs) + len(extra), cyclic, bad
    (count, cyclic, bad), sec = _timed(run)
    return Outcome(7, f"non-self-referential inputs imply acyclic term graphs ({count} proofs, {cyclic} cyclic)",
                   not bad and cyclic > 0, sec, None, {"proofs": count, "cyclic": cyclic, "failures": bad[:5]})


# ----------------------------------------------------------------- 8

def truth_table_valid(ant, suc, atoms) -> bool:
    """Classical validity of ⋀ant → ⋁suc by enumerating valuations."""
    def ev(f: Formula, v) -> bool:
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            return v[f.name]
        if isinstance(f, Not):
            return not ev(f.body, v)
        if isinstance(f, And):
            return ev(f.left, v) and ev(f.right, v)
        if isinstance(f, Or):
            return ev(f.left, v) or ev(f.right, v)
        if isinstance(f, Implies):
            return not ev(f.left, v) or ev(f.right, v)
        raise TypeError(f"not propositional: {render(f)}")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        v = dict(zip(atoms, bits))
        if all(ev(f, v) for f in ant) and not any(ev(f, v) for f in suc):
            return False
    return True


def brute_selfref(elems) -> int | None:
    """Length of the shortest self-referential ordered subset of size ≤ 4, by enumeration."""
    from .syntax import subterms
    for k in range(1, min(4, len(elems)) + 1):
        for combo in itertools.permutations(elems, k):
            if all(combo[(i + 1) % k].term in subterms(combo[i].body) for i in range(k)):
                return k
    return None


def random_term_set(rng: random.Random, size: int) -> list:
    from .syntax import Const
    consts = [Const(f"c{i}") for i in range(size)]
    out = []
    for c in consts:
        body = Atom(rng.choice("PQ"))
        for d in consts:
            if rng.random() < 0.18:
                body = Implies(Proof(d, Atom(rng.choice("PQ"))), body)
        out.append(Proof(c, body))
    return out


def criterion_8(seed: int = 3, selfref_sets: int = 400, tt_sequents: int = 400, kripke_sequents: int = 60) -> Outcome:
    rng = random.Random(seed)

    def run():
        d = {"selfref_mismatch": 0, "tt_mismatch": 0, "kripke_counter": 0}
        for _ in range(selfref_sets):
            elems = random_term_set(rng, rng.randint(1, 8))
            v = classify_selfref(elems)
            b = brute_selfref(elems)
            length = len(v.witness) if v.self_referential else None
            if (b is None and length is not None and length <= 4) or (b is not None and b != length) \
                    or not verify_witness(v):
                d["selfref_mismatch"] += 1
        atoms = ("P", "Q", "R")
        for _ in range(tt_sequents):
            s = C.random_sequent(rng, depth=3, max_side=2,
                                 gen=lambda r, dep: _prop(r, dep, atoms))
            if decide_g3s(s).proved != truth_table_valid(s.ant, s.suc, atoms):
                d["tt_mismatch"] += 1
        models = [m for m in s4_models(3, ("P", "Q"))]
        d["models"] = len(models)
        checked = 0
        for p in C.cut_free_corpus(kripke_sequents, seed=seed, gen=C.random_full):
            checked += 1
            s = p.sequent
            for m in models:
                if not all(_holds(m, w, s) for w in m.worlds):
                    d["kripke_counter"] += 1
                    break
        d["kripke_sequents"] = checked
        return d
    d, sec = _timed(run)
    ok = d["selfref_mismatch"] == 0 and d["tt_mismatch"] == 0 and d["kripke_counter"] == 0
    return Outcome(8, "oracle equivalences (self-reference, truth tables, S4 models)", ok, sec, None, d)


def _prop(rng, depth, atoms):
    if depth <= 0 or rng.random() < 0.3:
        return Atom(rng.choice(atoms)) if rng.random() > 0.05 else Bottom()
    r = rng.random()
    if r < 0.2:
        return Not(_prop(rng, depth - 1, atoms))
    cls = rng.choice((And, Or, Implies))
    return cls(_prop(rng, depth - 1, atoms), _prop(rng, depth - 1, atoms))


def _holds(m, w, s) -> bool:
    return not all(kripke_eval(m, w, f) for f in s.ant) or any(kripke_eval(m, w, f) for f in s.suc)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
            7: criterion_7, 8: criterion_8}


def run_all(which=None) -> list:
    return [CRITERIA[k]() for k in sorted(which or CRITERIA)]
