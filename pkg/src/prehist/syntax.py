"""Formulas and terms of S4 and the Logic of Proofs.

One node family covers both languages: ``Box``/``Dia`` only appear in modal
formulas and ``Proof`` (``t:A``) only in LP formulas.  Occurrences inside a
formula are addressed by paths, tuples of child indices from the root.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

__all__ = [
    "Formula", "Bottom", "Atom", "Not", "And", "Or", "Implies", "Box", "Diamond", "Proof",
    "Term", "Const", "Var", "App", "Sum", "Bang",
    "Polarity", "ParseError", "parse", "parse_term", "render", "render_term",
    "children", "rebuild", "subformula_at", "positions", "box_positions", "proof_positions",
    "is_minimal", "is_modal", "is_lp", "polarity_map", "lp_subformulas", "subterms",
    "forgetful_formula", "desugar", "strip_tags", "tag_signature", "atoms_of",
]


# ---------------------------------------------------------------- terms

class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Bang(Term):
    body: Term


# ------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    """``[]body``.  ``tag`` rides along through rewrites and is ignored by equality."""

    body: Formula
    tag: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Diamond(Formula):
    body: Formula


@dataclass(frozen=True)
class Proof(Formula):
    term: Term
    body: Formula


BOTTOM = Bottom()
Node = Union[Formula, Term]


def children(f: Formula) -> tuple:
    if isinstance(f, (Bottom, Atom)):
        return ()
    if isinstance(f, (Not, Box, Diamond, Proof)):
        return (f.body,)
    return (f.left, f.right)


def rebuild(f: Formula, kids: tuple) -> Formula:
    """Same connective as ``f`` over new children; keeps a box's tag."""
    if isinstance(f, (Bottom, Atom)):
        return f
    if isinstance(f, Box):
        return Box(kids[0], f.tag)
    if isinstance(f, Proof):
        return Proof(f.term, kids[0])
    if isinstance(f, (Not, Diamond)):
        return type(f)(kids[0])
    return type(f)(kids[0], kids[1])


def subformula_at(f: Formula, path: tuple) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def positions(f: Formula, prefix: tuple = ()) -> Iterator[tuple]:
    """Preorder ``(path, subformula)`` pairs."""
    yield prefix, f
    for i, c in enumerate(children(f)):
        yield from positions(c, prefix + (i,))


def box_positions(f: Formula) -> list:
    return [p for p, g in positions(f) if isinstance(g, Box)]


def proof_positions(f: Formula) -> list:
    return [p for p, g in positions(f) if isinstance(g, Proof)]


def tag_signature(f: Formula) -> tuple:
    return tuple(g.tag for _, g in positions(f) if isinstance(g, Box))


def strip_tags(f: Formula) -> Formula:
    if isinstance(f, Box):
        return Box(strip_tags(f.body))
    kids = children(f)
    return rebuild(f, tuple(strip_tags(k) for k in kids)) if kids else f


def atoms_of(f: Formula) -> set:
    return {g.name for _, g in positions(f) if isinstance(g, Atom)}


def is_minimal(f: Formula) -> bool:
    return not any(isinstance(g, (Not, And, Or, Diamond)) for _, g in positions(f))


def is_modal(f: Formula) -> bool:
    return not any(isinstance(g, Proof) for _, g in positions(f))


def is_lp(f: Formula) -> bool:
    return not any(isinstance(g, (Box, Diamond)) for _, g in positions(f))


# ------------------------------------------------------------- polarity

class Polarity(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    def flip(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


def _polarities(f: Formula, pol: Polarity, path: tuple, out: dict) -> None:
    out[path] = pol
    if isinstance(f, Implies):
        _polarities(f.left, pol.flip(), path + (0,), out)
        _polarities(f.right, pol, path + (1,), out)
    elif isinstance(f, Not):
        _polarities(f.body, pol.flip(), path + (0,), out)
    else:
        for i, c in enumerate(children(f)):
            _polarities(c, pol, path + (i,), out)


def polarity_map(root) -> dict:
    """Polarity of every subformula occurrence.

    For a formula the keys are paths; for a sequent they are
    ``(side, index, path)`` with antecedent members flipped.
    """
    if isinstance(root, Formula):
        out: dict = {}
        _polarities(root, Polarity.POSITIVE, (), out)
        return out
    out = {}
    for side, forms in (("ant", root.ant), ("suc", root.suc)):
        start = Polarity.NEGATIVE if side == "ant" else Polarity.POSITIVE
        for i, f in enumerate(forms):
            local: dict = {}
            _polarities(f, start, (), local)
            for p, v in local.items():
                out[(side, i, p)] = v
    return out


# ------------------------------------------------- LP subformulas, terms

def lp_subformulas(f: Formula) -> set:
    if isinstance(f, (Bottom, Atom)):
        return {f}
    if isinstance(f, Proof):
        out = lp_subformulas(f.body) | {f}
        if isinstance(f.term, Sum):
            # recursive so nested sums stay closed
            out |= lp_subformulas(Proof(f.term.left, f.body)) | lp_subformulas(Proof(f.term.right, f.body))
        return out
    out = {f}
    for c in children(f):
        out |= lp_subformulas(c)
    return out


def _term_subterms(t: Term) -> set:
    if isinstance(t, (Const, Var)):
        return {t}
    if isinstance(t, Bang):
        return _term_subterms(t.body) | {t}
    return _term_subterms(t.left) | _term_subterms(t.right) | {t}


def subterms(x) -> set:
    if isinstance(x, Term):
        return _term_subterms(x)
    out: set = set()
    for _, g in positions(x):
        if isinstance(g, Proof):
            out |= _term_subterms(g.term)
    return out


# ---------------------------------------------------- projections, sugar

def forgetful_formula(f: Formula, tag=None) -> Formula:
    """Replace every ``t:A`` by ``[]A``.

    ``tag`` may be a callable ``path -> object`` used to tag the produced boxes.
    """
    def go(g: Formula, path: tuple) -> Formula:
        kids = tuple(go(c, path + (i,)) for i, c in enumerate(children(g)))
        if isinstance(g, Proof):
            return Box(kids[0], tag(path) if tag else None)
        return rebuild(g, kids) if kids else g
    return go(f, ())


def desugar(f: Formula) -> Formula:
    """Rewrite into ``{bot, ->, []}``: ~A = A->bot, A&B = ~(A->~B), A|B = ~A->B, <>A = ~[]~A."""
    def neg(a):
        return Implies(a, BOTTOM)
    if isinstance(f, (Bottom, Atom)):
        return f
    if isinstance(f, Not):
        return neg(desugar(f.body))
    if isinstance(f, And):
        return neg(Implies(desugar(f.left), neg(desugar(f.right))))
    if isinstance(f, Or):
        return Implies(neg(desugar(f.left)), desugar(f.right))
    if isinstance(f, Diamond):
        return neg(Box(neg(desugar(f.body))))
    return rebuild(f, tuple(desugar(c) for c in children(f)))


# -------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))
        self.pos = pos


_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "□": "[]", "◇": "<>", "⊥": "bot", "·": "*"}
_ANNOT_SYMBOLS = {"⊞": "p", "⊡": "o", "⊟": "n"}
_ANNOT_ASCII = {"+": "p", ".": "o", "-": "n"}
_TOKEN = re.compile(
    r"\s*(?:(?P<annot>\[[+.\-]\d+\])|(?P<uannot>[⊞⊡⊟]\d+)|(?P<op>->|\[\]|<>|=>|⊃|[~&|!*+:(),])"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<uni>[¬∧∨→□◇⊥·]))"
)
DEFAULT_CONST_PREFIXES = ("c", "t")


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos, text)
        start = m.start(m.lastgroup)
        if m.group("annot"):
            s = m.group("annot")
            toks.append(("annot", (_ANNOT_ASCII[s[1]], int(s[2:-1])), start))
        elif m.group("uannot"):
            s = m.group("uannot")
            toks.append(("annot", (_ANNOT_SYMBOLS[s[0]], int(s[1:])), start))
        elif m.group("ident"):
            name = m.group("ident")
            toks.append(("bot", name, start) if name == "bot" else ("ident", name, start))
        elif m.group("uni"):
            s = _ALIASES[m.group("uni")]
            toks.append(("bot", s, start) if s == "bot" else ("op", s, start))
        else:
            s = m.group("op")
            toks.append(("op", "=>" if s == "⊃" else s, start))
        pos = m.end()
    toks.append(("eof", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, language: str, const_prefixes):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.language = language
        self.const_prefixes = tuple(const_prefixes)

    # helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def is_op(self, s: str) -> bool:
        t = self.peek()
        return t[0] == "op" and t[1] == s

    def expect(self, s: str):
        if not self.is_op(s):
            self.fail(f"expected {s!r}")
        self.i += 1

    def fail(self, msg: str):
        kind, val, pos = self.peek()
        found = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"{msg}, found {found}", pos, self.text)

    # formulas
    def formula(self) -> Formula:
        left = self.disj()
        if self.is_op("->"):
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.is_op("|"):
            self.i += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.is_op("&"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "~":
            self.i += 1
            return Not(self.unary())
        if kind == "op" and val in ("[]", "<>") or kind == "annot":
            if self.language == "lp":
                raise ParseError("modal operator inside an LP formula", pos, self.text)
            self.i += 1
            body = self.unary()
            if kind == "annot":
                return Box(body, val)
            return Box(body) if val == "[]" else Diamond(body)
        if self.starts_term():
            save = self.i
            try:
                t = self.term()
                if self.is_op(":"):
                    if self.language == "modal":
                        raise ParseError("term syntax inside a modal formula", pos, self.text)
                    self.i += 1
                    return Proof(t, self.unary())
            except ParseError as e:
                if "modal formula" in str(e):
                    raise
            self.i = save
            if kind == "ident" or (kind == "op" and val == "!"):
                if self.language == "modal":
                    raise ParseError("term syntax inside a modal formula", pos, self.text)
                self.fail("expected ':' after justification term")
        return self.primary()

    def starts_term(self) -> bool:
        kind, val, _ = self.peek()
        if kind == "ident":
            return val[0].islower()
        return kind == "op" and val in ("!", "(")

    def primary(self) -> Formula:
        kind, val, _ = self.peek()
        if kind == "bot":
            self.i += 1
            return BOTTOM
        if kind == "ident" and val[0].isupper():
            self.i += 1
            return Atom(val)
        if kind == "op" and val == "(":
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        self.fail("expected a formula")

    # terms
    def term(self) -> Term:
        t = self.product()
        while self.is_op("+"):
            self.i += 1
            t = Sum(t, self.product())
        return t

    def product(self) -> Term:
        t = self.bang()
        while self.is_op("*"):
            self.i += 1
            t = App(t, self.bang())
        return t

    def bang(self) -> Term:
        kind, val, _ = self.peek()
        if kind == "op" and val == "!":
            self.i += 1
            return Bang(self.bang())
        if kind == "ident" and val[0].islower():
            self.i += 1
            return Const(val) if val.startswith(self.const_prefixes) else Var(val)
        if kind == "op" and val == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        self.fail("expected a term")

    def done(self):
        if self.peek()[0] != "eof":
            self.fail("unexpected trailing input")


def parse(text: str, language: str = "modal", const_prefixes=DEFAULT_CONST_PREFIXES) -> Formula:
    """Parse one formula.  ``language`` is ``modal``, ``lp`` or ``any``."""
    if language not in ("modal", "lp", "any"):
        raise ValueError(f"unknown language {language!r}")
    p = _Parser(text, language, const_prefixes)
    f = p.formula()
    p.done()
    return f


def parse_term(text: str, const_prefixes=DEFAULT_CONST_PREFIXES) -> Term:
    p = _Parser(text, "lp", const_prefixes)
    t = p.term()
    p.done()
    return t


def parse_formula_list(p: _Parser) -> list:
    out = []
    if p.peek()[0] == "eof" or p.is_op("=>"):
        return out
    out.append(p.formula())
    while p.is_op(","):
        p.i += 1
        out.append(p.formula())
    return out


# ------------------------------------------------------------ rendering

_PREC = {Implies: 1, Or: 2, And: 3}
_ASCII = {"not": "~", "and": " & ", "or": " | ", "imp": " -> ", "box": "[]", "dia": "<>",
          "bot": "bot", "app": "*"}
_UNICODE = {"not": "¬", "and": " ∧ ", "or": " ∨ ", "imp": " → ", "box": "□", "dia": "◇",
            "bot": "⊥", "app": "·"}
_ANNOT_OUT_ASCII = {"p": "+", "o": ".", "n": "-"}
_ANNOT_OUT_UNICODE = {"p": "⊞", "o": "⊡", "n": "⊟"}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def render_term(t: Term, unicode: bool = False, ctx: int = 0) -> str:
    sym = _UNICODE if unicode else _ASCII
    if isinstance(t, (Const, Var)):
        return t.name
    if isinstance(t, Bang):
        return "!" + render_term(t.body, unicode, 3)
    if isinstance(t, App):
        s = render_term(t.left, unicode, 2) + sym["app"] + render_term(t.right, unicode, 3)
        return f"({s})" if ctx > 2 else s
    s = render_term(t.left, unicode, 1) + "+" + render_term(t.right, unicode, 2)
    return f"({s})" if ctx > 1 else s


def _box_prefix(f: Box, unicode: bool) -> str:
    lab = f.tag
    if isinstance(lab, tuple) and len(lab) == 2 and lab[0] in ("p", "o", "n") and isinstance(lab[1], int):
        if unicode:
            return f"{_ANNOT_OUT_UNICODE[lab[0]]}{lab[1]}"
        return f"[{_ANNOT_OUT_ASCII[lab[0]]}{lab[1]}]"
    return _UNICODE["box"] if unicode else _ASCII["box"]


def render(f: Formula, unicode: bool = False, annotated: bool = False) -> str:
    """Canonical text with minimal parentheses.

    With ``annotated`` boxes carrying ``(kind, index)`` labels print as
    ``[+i]``/``[.i]``/``[-i]`` (or ``⊞i``/``⊡i``/``⊟i``).
    """
    sym = _UNICODE if unicode else _ASCII

    def go(g: Formula, need: int) -> str:
        if isinstance(g, Bottom):
            return sym["bot"]
        if isinstance(g, Atom):
            return g.name
        if isinstance(g, Not):
            s = sym["not"] + go(g.body, 4)
        elif isinstance(g, Box):
            s = (_box_prefix(g, unicode) if annotated else sym["box"]) + go(g.body, 4)
        elif isinstance(g, Diamond):
            s = sym["dia"] + go(g.body, 4)
        elif isinstance(g, Proof):
            s = render_term(g.term, unicode, 3) + ":" + go(g.body, 4)
        elif isinstance(g, Implies):
            s = go(g.left, 2) + sym["imp"] + go(g.right, 1)
        elif isinstance(g, Or):
            s = go(g.left, 2) + sym["or"] + go(g.right, 3)
        else:
            s = go(g.left, 3) + sym["and"] + go(g.right, 4)
        return f"({s})" if _prec(g) < need else s

    return go(f, 0)
