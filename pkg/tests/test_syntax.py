from hypothesis import given, settings

from prehist.syntax import (
    And, App, Atom, Bang, Bottom, Box, Const, Implies, Not, Polarity, Proof, Sum, Var, ParseError,
    forgetful_formula, lp_subformulas, parse, polarity_map, positions, render, subterms,
)
from prehist.proofs import parse_sequent

import pytest

from conftest import any_formulas, lp_formulas

P, Q = Atom("P"), Atom("Q")
x, t = Var("x"), Const("t")


def test_parse_examples():
    assert parse("~ [] (P & ~ [] P)", "modal") == Not(Box(And(P, Not(Box(P)))))
    assert parse("bot -> P", "modal") == Implies(Bottom(), P)
    assert parse("x:(P & ~ (t*x):P)", "lp") == Proof(x, And(P, Not(Proof(App(t, x), P))))


def test_unicode_aliases_agree():
    assert parse("¬□(P ∧ ¬□P)") == parse("~[](P & ~[]P)")
    assert parse("¬x:(P ∧ ¬(t·x):P)", "lp") == parse("~x:(P & ~(t*x):P)", "lp")


def test_language_restrictions():
    with pytest.raises(ParseError):
        parse("x:P", "modal")
    with pytest.raises(ParseError):
        parse("[]P", "lp")


def test_render_examples():
    assert render(Box(P)) == "[]P"
    assert render(Proof(App(t, x), P)) == "(t*x):P"


@settings(max_examples=10_000, deadline=None)
@given(any_formulas)
def test_round_trip(f):
    assert parse(render(f), "any") == f
    assert parse(render(f, unicode=True), "any") == f


def test_lp_subformulas_examples():
    s = Const("s")
    assert lp_subformulas(Proof(Sum(s, t), P)) == {P, Proof(s, P), Proof(t, P), Proof(Sum(s, t), P)}
    assert lp_subformulas(P) == {P}
    f = Proof(x, Implies(P, Q))
    assert lp_subformulas(f) == {P, Q, Implies(P, Q), f}


@given(lp_formulas)
def test_lp_subformulas_closed(f):
    subs = lp_subformulas(f)
    for g in subs:
        assert lp_subformulas(g) <= subs


def test_subterms_examples():
    tx = App(t, x)
    assert subterms(Bang(tx)) == {t, x, tx, Bang(tx)}
    assert subterms(Const("c")) == {Const("c")}
    assert subterms(parse("t:(P & ~(t*x):P -> P)", "lp")) == {t, x, tx}


def test_polarity_examples():
    s = parse_sequent("=> ~[](P & ~[]P)")
    pm = polarity_map(s)
    assert pm[("suc", 0, (0,))] is Polarity.NEGATIVE
    assert pm[("suc", 0, (0, 0, 1, 0))] is Polarity.POSITIVE
    assert polarity_map(P)[()] is Polarity.POSITIVE
    s2 = parse_sequent("[]P => []P")
    assert polarity_map(s2)[("ant", 0, ())] is Polarity.NEGATIVE
    assert polarity_map(s2)[("suc", 0, ())] is Polarity.POSITIVE


@given(any_formulas)
def test_polarity_total_and_flips(f):
    paths = [p for p, _ in positions(f)]
    pm = polarity_map(f)
    assert set(pm) == set(paths)
    from prehist.proofs import Sequent
    left = polarity_map(Sequent((f,), ()))
    right = polarity_map(Sequent((), (f,)))
    for p in paths:
        assert left[("ant", 0, p)] is right[("suc", 0, p)].flip()


def test_forgetful_examples():
    assert forgetful_formula(parse("x:(P & ~(t*x):P)", "lp")) == parse("[](P & ~[]P)")
    assert forgetful_formula(P) == P
    assert forgetful_formula(parse("y:(P & ~(y*x):P -> P)", "lp")) == parse("[](P & ~[]P -> P)")


def _skeleton(f):
    from prehist.syntax import children, rebuild
    kids = tuple(_skeleton(c) for c in children(f))
    if isinstance(f, Proof):
        return Box(kids[0])
    return rebuild(f, kids) if kids else f


@given(lp_formulas)
def test_forgetful_erases_terms(f):
    g = forgetful_formula(f)
    assert not any(isinstance(h, Proof) for _, h in positions(g))
    assert g == _skeleton(f)
