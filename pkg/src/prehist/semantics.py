"""Finite Kripke models for the modal language."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .syntax import And, Atom, Bottom, Box, Diamond, Formula, Implies, Not, Or, Proof


@dataclass(frozen=True)
class KripkeModel:
    worlds: frozenset
    relation: frozenset
    valuation: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "worlds", frozenset(self.worlds))
        object.__setattr__(self, "relation", frozenset(tuple(e) for e in self.relation))
        object.__setattr__(self, "valuation", {k: frozenset(v) for k, v in self.valuation.items()})
        for a, b in self.relation:
            if a not in self.worlds or b not in self.worlds:
                raise ValueError(f"relation pair ({a}, {b}) leaves the world set")
        for atom, ws in self.valuation.items():
            if not ws <= self.worlds:
                raise ValueError(f"valuation of {atom} leaves the world set")

    def successors(self, w) -> list:
        return [b for a, b in self.relation if a == w]

    @classmethod
    def from_json(cls, data: dict) -> "KripkeModel":
        return cls(data["worlds"], [tuple(e) for e in data["relation"]], data.get("valuation", {}))

    def to_json(self) -> dict:
        return {"worlds": sorted(self.worlds), "relation": sorted(list(e) for e in self.relation),
                "valuation": {k: sorted(v) for k, v in sorted(self.valuation.items())}}


def eval(m: KripkeModel, w, f: Formula) -> bool:  # noqa: A001 - the operation's name
    """Truth of ``f`` at ``w``; atoms without a valuation are false everywhere."""
    if w not in m.worlds:
        raise KeyError(f"unknown world {w!r}")
    return _ev(m, w, f)


def _ev(m, w, f) -> bool:
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        return w in m.valuation.get(f.name, ())
    if isinstance(f, Not):
        return not _ev(m, w, f.body)
    if isinstance(f, And):
        return _ev(m, w, f.left) and _ev(m, w, f.right)
    if isinstance(f, Or):
        return _ev(m, w, f.left) or _ev(m, w, f.right)
    if isinstance(f, Implies):
        return (not _ev(m, w, f.left)) or _ev(m, w, f.right)
    if isinstance(f, Box):
        return all(_ev(m, v, f.body) for v in m.successors(w))
    if isinstance(f, Diamond):
        return any(_ev(m, v, f.body) for v in m.successors(w))
    if isinstance(f, Proof):
        raise TypeError("LP formulas have no Kripke semantics here; project them first")
    raise TypeError(f"not a formula: {f!r}")


def is_s4_frame(m: KripkeModel) -> bool:
    r = m.relation
    if any((w, w) not in r for w in m.worlds):
        return False
    return all((a, d) in r for a, b in r for c, d in r if b == c)


def sequent_formula_holds(m: KripkeModel, w, ant, suc) -> bool:
    return not all(_ev(m, w, f) for f in ant) or any(_ev(m, w, f) for f in suc)


def s4_frames(n: int):
    """Every reflexive transitive relation on worlds ``0..n-1``."""
    worlds = list(range(n))
    off = [(a, b) for a in worlds for b in worlds if a != b]
    refl = {(w, w) for w in worlds}
    for bits in itertools.product((False, True), repeat=len(off)):
        rel = refl | {e for e, b in zip(off, bits) if b}
        if all((a, d) in rel for a, b in rel for c, d in rel if b == c):
            yield worlds, frozenset(rel)


def s4_models(max_worlds: int, atoms):
    """All S4 models up to ``max_worlds`` worlds over ``atoms`` (exhaustive)."""
    atoms = sorted(atoms)
    for n in range(1, max_worlds + 1):
        subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
        for worlds, rel in s4_frames(n):
            for vals in itertools.product(subsets, repeat=len(atoms)):
                yield KripkeModel(worlds, rel, dict(zip(atoms, vals)))


def load_model(path: str) -> KripkeModel:
    with open(path, encoding="utf-8") as fh:
        return KripkeModel.from_json(json.load(fh))
