"""Command-line front end.

Exit codes: 0 success or positive answer, 1 negative answer, 2 bound or
limit reached, 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.resources import files

from . import acceptance, families, lp_analysis, prover, semantics, transforms
from .proofs import (
    RuleError, Sequent, check_proof, infer_variant, parse_sequent, proof_from_json,
    proof_to_json, render_sequent,
)
from .syntax import ParseError, parse, render

FORMAT = "prehist/1"
OK, NO, LIMIT, BAD = 0, 1, 2, 3


class InputError(Exception):
    pass


# ------------------------------------------------------------ input

def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    if not os.path.exists(path):
        packaged = files("prehist").joinpath("fixtures").joinpath(os.path.basename(path))
        if packaged.is_file():
            return json.loads(packaged.read_text(encoding="utf-8"))
        raise InputError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _proof(path: str):
    data = _read_json(path)
    if isinstance(data, dict) and "proof" in data and "rule" not in data:
        data = data["proof"]
    return proof_from_json(data)


def _sequent(text: str) -> Sequent:
    return parse_sequent(text)


# ----------------------------------------------------------- output

def _proof_text(p, depth: int = 0) -> list:
    lines = [f"{'  ' * depth}{render_sequent(p.sequent, unicode=True, annotated=True)}   [{p.rule}]"]
    for q in p.premises:
        lines += _proof_text(q, depth + 1)
    return lines


def _text(payload: dict) -> str:
    out = []
    for k in sorted(payload):
        if k == "format":
            continue
        v = payload[k]
        if k == "proof" and isinstance(v, dict):
            out.append("proof:")
            out += ["  " + line for line in _proof_text(proof_from_json(v))]
        elif isinstance(v, (dict, list)):
            out.append(f"{k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
        else:
            out.append(f"{k}: {v}")
    return "\n".join(out) + "\n"


def _emit(args, payload: dict, dot: str | None = None):
    payload = {"format": FORMAT, **payload}
    if args.format == "dot" and dot is not None:
        text = dot
    elif args.format == "text":
        text = _text(payload)
    else:
        text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    target = getattr(args, "output", None)
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------- commands

def cmd_parse(args):
    if "=>" in args.text or "⊃" in args.text:
        s = _sequent(args.text)
        _emit(args, {"kind": "sequent", "ascii": render_sequent(s), "unicode": render_sequent(s, unicode=True)})
    else:
        f = parse(args.text, args.language)
        _emit(args, {"kind": "formula", "ascii": render(f), "unicode": render(f, unicode=True)})
    return OK


def cmd_check(args):
    p = _proof(args.proof)
    variant = args.variant or infer_variant(p)
    rep = check_proof(p, variant)
    _emit(args, rep.to_json())
    return OK if rep.ok else NO


def cmd_annotate(args):
    ann = families.classify_and_annotate(_proof(args.proof))
    fams = [{"id": f.name, "kind": f.kind, "class": f.cls} for f in ann.families]
    _emit(args, {"proof": proof_to_json(ann.annotated_proof(), annotated=True), "families": fams})
    return OK


def _default_mode(p) -> str:
    v = infer_variant(p)
    if v == "g3lp":
        return "lp-term"
    return "g3s-principal" if v in ("g3s", "g3s-min") else "all-box"


def cmd_graph(args):
    p = _proof(args.proof)
    g = families.prehistoric_graph(p, args.mode or _default_mode(p))
    _emit(args, {"graph": g.to_json()}, g.to_dot())
    return OK


def cmd_cycle(args):
    p = _proof(args.proof)
    g = families.prehistoric_graph(p, args.mode or _default_mode(p))
    cyc = families.find_cycle(g, left_only=args.left_only)
    _emit(args, {"cyclic": cyc is not None, "cycle": [f.name for f in cyc] if cyc else []})
    return OK if cyc else NO


def cmd_prove(args):
    s = _sequent(args.sequent)
    if args.calculus == "g3lp":
        res = prover.search_g3lp(s, forbid_const_intro=args.no_constants, depth_bound=args.depth)
    elif args.cycle_free:
        res = prover.find_cycle_free_proof(s)
    else:
        res = prover.decide_g3s(s)
    _emit(args, res.to_json())
    if res.proved:
        return OK
    return LIMIT if res.kind == prover.BOUND else NO


def _transform_exit(args, rep):
    _emit(args, rep.to_json())
    return OK if rep.ok else NO


def cmd_elim_cut(args):
    if args.right is None:
        return _transform_exit(args, transforms.eliminate_all(_proof(args.proof)))
    cut = parse(args.cut) if args.cut else None
    return _transform_exit(args, transforms.eliminate_cut(_proof(args.proof), _proof(args.right), cut))


def cmd_elim_boxcut(args):
    if args.right is None:
        return _transform_exit(args, transforms.eliminate_all(_proof(args.proof)))
    a = parse(args.cut) if args.cut else None
    return _transform_exit(args, transforms.eliminate_boxcut(_proof(args.proof), _proof(args.right), a))


def cmd_double_box(args):
    p = _proof(args.proof)
    rep = transforms.structural_report(p, lambda q: transforms.double_box(q, args.index), infer_variant(p))
    return _transform_exit(args, rep)


def cmd_project(args):
    p = _proof(args.proof)
    proj = transforms.project_proof(p)
    bad = transforms.projection_edge_check(p, proj)
    names = families.prehistoric_graph(proj.proof, "all-box").families
    src = families.prehistoric_graph(p, "lp-term").families

    def nm(fams, k):
        return fams[k].name if k is not None else None
    _emit(args, {
        "proof": proof_to_json(proj.proof),
        "family_map": {nm(names, k): nm(src, v) for k, v in sorted(proj.family_map.items())},
        "single_valued": proj.single_valued,
        "edge_violations": [[nm(names, h), nm(names, j)] for h, j, _, _ in bad],
    })
    return OK if proj.single_valued and not bad else NO


def cmd_inputs(args):
    _emit(args, lp_analysis.inputs_of(_proof(args.proof)).to_json())
    return OK


def _formula_set(text: str) -> list:
    return list(parse_sequent("=> " + text, "lp").suc)


def cmd_selfref(args):
    if args.set is not None:
        elems = _formula_set(args.set)
    elif args.proof is not None:
        elems = lp_analysis.inputs_of(_proof(args.proof)).formulas
    else:
        raise InputError("selfref needs a proof file or --set")
    v = lp_analysis.classify_selfref(elems)
    _emit(args, v.to_json())
    return OK if v.self_referential else NO


def _mapping(items) -> dict:
    out = {}
    for it in items:
        if it.lstrip().startswith("{"):
            out.update(json.loads(it))
            continue
        if "=" not in it:
            raise InputError(f"expected SYMBOL=TERM, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_realize_apply(args):
    r = lp_analysis.realization(_mapping(args.map))
    f = parse(args.formula, "modal")
    g = lp_analysis.apply_realization(r, f)
    _emit(args, {"formula": render(g), "unicode": render(g, unicode=True),
                 "realization": lp_analysis.render_realization(r),
                 "normal": lp_analysis.check_normal(r, af=f)})
    return OK


def cmd_check_hilbert(args):
    steps, assumptions = lp_analysis.load_hilbert(_read_json(args.derivation))
    res = lp_analysis.check_hilbert(steps, assumptions)
    _emit(args, res.to_json())
    return OK if res.accepted else NO


def cmd_kripke(args):
    m = semantics.KripkeModel.from_json(_read_json(args.model))
    f = parse(args.formula, "modal")
    worlds = [_world(args.world, m)] if args.world is not None else sorted(m.worlds, key=str)
    truth = {str(w): semantics.eval(m, w, f) for w in worlds}
    _emit(args, {"formula": render(f), "truth": truth, "s4": semantics.is_s4_frame(m)})
    return OK if all(truth.values()) else NO


def _world(text: str, m):
    for w in m.worlds:
        if str(w) == text:
            return w
    raise InputError(f"unknown world {text!r}")


def cmd_selftest(args):
    which = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    outcomes = acceptance.run_all(which)
    if args.format == "json":
        _emit(args, {"criteria": [o.to_json() for o in outcomes]})
    else:
        for o in outcomes:
            sys.stdout.write(o.line() + "\n")
    return OK if all(o.passed for o in outcomes) else NO


# ----------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "dot", "text"), default=argparse.SUPPRESS)
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="write to a file instead of stdout")

    ap = argparse.ArgumentParser(prog="prehist", description="Prehistoric analysis of G3s and G3lp proofs.")
    ap.add_argument("--format", choices=("json", "dot", "text"), default="json")
    ap.add_argument("-o", "--output", default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("parse", cmd_parse, "parse a formula or sequent and print canonical forms")
    sp.add_argument("text")
    sp.add_argument("--language", choices=("modal", "lp", "any"), default="any")

    sp = add("check", cmd_check, "validate a proof file")
    sp.add_argument("proof")
    sp.add_argument("--variant", "--calculus", dest="variant")

    add("annotate", cmd_annotate, "classify families and annotate a cut-free G3s proof").add_argument("proof")

    for name, fn, help_ in (("graph", cmd_graph, "prehistoric graph"), ("cycle", cmd_cycle, "find a prehistoric cycle")):
        sp = add(name, fn, help_)
        sp.add_argument("proof")
        sp.add_argument("--mode", choices=families.MODES)
        if name == "cycle":
            sp.add_argument("--left-only", action="store_true")

    sp = add("prove", cmd_prove, "search for a proof")
    sp.add_argument("sequent")
    sp.add_argument("--calculus", choices=("g3s", "g3lp"), default="g3s")
    sp.add_argument("--cycle-free", action="store_true")
    sp.add_argument("--no-constants", action="store_true")
    sp.add_argument("--depth", type=int, default=64)

    for name, fn in (("elim-cut", cmd_elim_cut), ("elim-boxcut", cmd_elim_boxcut)):
        sp = add(name, fn, "eliminate cuts; one file removes every cut, two files cut their end-sequents")
        sp.add_argument("proof")
        sp.add_argument("right", nargs="?")
        sp.add_argument("--cut", help="cut formula (A for □Cut)")

    sp = add("double-box", cmd_double_box, "turn □A at a succedent index into □□A")
    sp.add_argument("proof")
    sp.add_argument("--index", type=int, required=True)

    add("project", cmd_project, "forgetful projection of a G3lp proof").add_argument("proof")
    add("inputs", cmd_inputs, "inputs and constant specification of a G3lp proof").add_argument("proof")

    sp = add("selfref", cmd_selfref, "self-referentiality of a proof's inputs or of a formula set")
    sp.add_argument("proof", nargs="?")
    sp.add_argument("--set", help="comma-separated t:A formulas")

    sp = add("realize-apply", cmd_realize_apply, "apply a realization to an annotated formula")
    sp.add_argument("formula")
    sp.add_argument("map", nargs="+", help="SYMBOL=TERM pairs or a JSON object")

    add("check-hilbert", cmd_check_hilbert, "check an LP Hilbert derivation").add_argument("derivation")

    sp = add("kripke", cmd_kripke, "evaluate a formula in a Kripke model")
    sp.add_argument("action", choices=("eval",))
    sp.add_argument("model")
    sp.add_argument("formula")
    sp.add_argument("--world")

    sp = add("selftest", cmd_selftest, "run the acceptance suite")
    sp.add_argument("--criteria", help="comma-separated criterion numbers")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return BAD if e.code not in (0, None) else OK
    try:
        return args.func(args)
    except (InputError, ParseError, RuleError, ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as e:
        sys.stderr.write(f"prehist: {type(e).__name__}: {e}\n")
        return BAD


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
