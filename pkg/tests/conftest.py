import json
from importlib.resources import files

import pytest
from hypothesis import strategies as st

from prehist.proofs import proof_from_json
from prehist.syntax import (
    And, App, Atom, Bang, Bottom, Box, Const, Diamond, Implies, Not, Or, Proof, Sum, Var,
)

ATOMS = st.sampled_from(["P", "Q", "R", "Foo"]).map(Atom)
terms = st.recursive(
    st.sampled_from([Const("t"), Const("c0"), Const("c12"), Var("x"), Var("y"), Var("u1")]),
    lambda sub: st.one_of(
        st.builds(App, sub, sub), st.builds(Sum, sub, sub), st.builds(Bang, sub)),
    max_leaves=4,
)


def _formulas(lp: bool, modal: bool):
    def extend(sub):
        opts = [st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub),
                st.builds(Implies, sub, sub)]
        if modal:
            opts += [st.builds(Box, sub), st.builds(Diamond, sub)]
        if lp:
            opts.append(st.builds(Proof, terms, sub))
        return st.one_of(*opts)
    return st.recursive(st.one_of(ATOMS, st.just(Bottom())), extend, max_leaves=8)


modal_formulas = _formulas(lp=False, modal=True)
lp_formulas = _formulas(lp=True, modal=False)
any_formulas = _formulas(lp=True, modal=True)


def load_fixture(name: str):
    data = json.loads(files("prehist").joinpath("fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8"))
    return proof_from_json(data.get("proof", data) if "rule" not in data else data)


@pytest.fixture(scope="session")
def g3s_example():
    return load_fixture("g3s_example")


@pytest.fixture(scope="session")
def g3lp_example():
    return load_fixture("g3lp_example")


@pytest.fixture(scope="session")
def g3lp_projection():
    return load_fixture("g3lp_projection")
