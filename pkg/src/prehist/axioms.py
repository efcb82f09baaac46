"""Recognising LP axioms: classical tautologies (A0) and the schemas A1-A4."""

from __future__ import annotations

import itertools

from .syntax import (
    And, App, Atom, Bang, Bottom, Box, Diamond, Formula, Implies, Not, Or, Proof, Sum,
    parse,
)

# Hilbert-style base for classical logic, used by the "schema-list" mode.
# Atoms in a schema act as metavariables.
DEFAULT_A0_SCHEMAS = (
    "A -> B -> A",
    "(A -> B -> C) -> (A -> B) -> A -> C",
    "(~B -> ~A) -> A -> B",
    "((A -> bot) -> bot) -> A",
    "bot -> A",
    "A & B -> A",
    "A & B -> B",
    "A -> B -> A & B",
    "A -> A | B",
    "B -> A | B",
    "(A -> C) -> (B -> C) -> A | B -> C",
    "~A -> A -> B",
    "(A -> bot) -> ~A",
    "~A -> A -> bot",
)


def _opaque_atoms(f: Formula, acc: dict) -> None:
    if isinstance(f, (Atom, Proof, Box, Diamond)):
        acc.setdefault(f, len(acc))
        return
    for c in (getattr(f, "left", None), getattr(f, "right", None), getattr(f, "body", None)):
        if c is not None:
            _opaque_atoms(c, acc)


def _truth(f: Formula, val: dict) -> bool:
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not _truth(f.body, val)
    if isinstance(f, And):
        return _truth(f.left, val) and _truth(f.right, val)
    if isinstance(f, Or):
        return _truth(f.left, val) or _truth(f.right, val)
    if isinstance(f, Implies):
        return (not _truth(f.left, val)) or _truth(f.right, val)
    return val[f]


def is_tautology(f: Formula) -> bool:
    """Truth-table check with atoms and maximal ``t:B``/``[]B`` subformulas opaque."""
    atoms: dict = {}
    _opaque_atoms(f, atoms)
    keys = list(atoms)
    for bits in itertools.product((False, True), repeat=len(keys)):
        if not _truth(f, dict(zip(keys, bits))):
            return False
    return True


def match_schema(schema: Formula, f: Formula, binding: dict | None = None) -> dict | None:
    """Match ``f`` against ``schema`` whose atoms are metavariables."""
    binding = {} if binding is None else binding
    if isinstance(schema, Atom):
        bound = binding.get(schema.name)
        if bound is None:
            binding[schema.name] = f
            return binding
        return binding if bound == f else None
    if type(schema) is not type(f):
        return None
    if isinstance(schema, Bottom):
        return binding
    if isinstance(schema, Proof):
        if schema.term != f.term:
            return None
        return match_schema(schema.body, f.body, binding)
    for s, g in zip((getattr(schema, "left", None), getattr(schema, "right", None), getattr(schema, "body", None)),
                    (getattr(f, "left", None), getattr(f, "right", None), getattr(f, "body", None))):
        if s is None:
            continue
        if match_schema(s, g, binding) is None:
            return None
    return binding


def is_a1(f: Formula) -> bool:
    # t:F -> F
    return isinstance(f, Implies) and isinstance(f.left, Proof) and f.left.body == f.right


def is_a2(f: Formula) -> bool:
    # s:(F -> G) -> (t:F -> (s*t):G)
    if not (isinstance(f, Implies) and isinstance(f.left, Proof) and isinstance(f.right, Implies)):
        return False
    s_fg, rest = f.left, f.right
    if not (isinstance(s_fg.body, Implies) and isinstance(rest.left, Proof) and isinstance(rest.right, Proof)):
        return False
    t_f, st_g = rest.left, rest.right
    return (st_g.term == App(s_fg.term, t_f.term)
            and s_fg.body.left == t_f.body and s_fg.body.right == st_g.body)


def is_a3(f: Formula) -> bool:
    # t:F -> !t:(t:F)
    return (isinstance(f, Implies) and isinstance(f.left, Proof) and isinstance(f.right, Proof)
            and f.right.term == Bang(f.left.term) and f.right.body == f.left)


def is_a4(f: Formula) -> bool:
    # s:F -> (s+t):F  or  t:F -> (s+t):F
    if not (isinstance(f, Implies) and isinstance(f.left, Proof) and isinstance(f.right, Proof)):
        return False
    if f.left.body != f.right.body or not isinstance(f.right.term, Sum):
        return False
    return f.left.term in (f.right.term.left, f.right.term.right)


_SCHEMA_CACHE: dict = {}


def _schemas(texts) -> list:
    key = tuple(texts)
    if key not in _SCHEMA_CACHE:
        _SCHEMA_CACHE[key] = [parse(t, "any") for t in key]
    return _SCHEMA_CACHE[key]


def axiom_kind(f: Formula, mode: str = "tautology", schemas=DEFAULT_A0_SCHEMAS) -> str | None:
    """Name of the first axiom group ``f`` belongs to, or ``None``."""
    if is_a1(f):
        return "A1"
    if is_a2(f):
        return "A2"
    if is_a3(f):
        return "A3"
    if is_a4(f):
        return "A4"
    if mode == "tautology":
        return "A0" if is_tautology(f) else None
    if mode == "schema-list":
        return "A0" if any(match_schema(s, f) is not None for s in _schemas(schemas)) else None
    raise ValueError(f"unknown axiom mode {mode!r}")


def is_lp_axiom(f: Formula, mode: str = "tautology", schemas=DEFAULT_A0_SCHEMAS) -> bool:
    return axiom_kind(f, mode, schemas) is not None
