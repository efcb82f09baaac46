import json
from importlib.resources import files

import pytest

from prehist.cli import main

FIX = files("prehist").joinpath("fixtures")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fx(name):
    return str(FIX.joinpath(f"{name}.json"))


def test_prove_example(capsys):
    code, out, _ = run(capsys, "prove", "⊃ ~[](P & ~[]P)")
    assert code == 0
    d = json.loads(out)
    assert d["format"] == "prehist/1" and d["result"] == "Proved" and d["proof"]["rule"]


def test_prove_cycle_free_absence(capsys):
    code, out, _ = run(capsys, "prove", "--cycle-free", "⊃ [](P & ~[]P -> P) -> ~[](P & ~[]P)")
    assert code == 1
    assert json.loads(out)["result"] == "NoCycleFreeProof"


def test_prove_g3lp_and_bound(capsys):
    code, _, _ = run(capsys, "prove", "--calculus", "g3lp", "--no-constants",
                     "=> y:(P & ~(y*x):P -> P) -> ~x:(P & ~(y*x):P)")
    assert code == 0
    code, out, _ = run(capsys, "prove", "--calculus", "g3lp", "--depth", "3", "=> x:P")
    assert code in (1, 2)


def test_graph_dot_golden(capsys):
    code, out, _ = run(capsys, "graph", "--format", "dot", "fixtures/g3lp_example.json")
    assert code == 0
    assert out == (
        "digraph prehistoric {\n"
        '  "t0";\n  "t1";\n  "t2";\n'
        '  "t0" -> "t1" [label="L"];\n'
        '  "t1" -> "t1" [label="L"];\n'
        '  "t2" -> "t1" [label="L"];\n'
        '  "t2" -> "t1" [label="R"];\n'
        "}\n")


@pytest.mark.parametrize("name", ["g3s_example", "g3lp_example", "g3lp_projection"])
def test_fixture_pipeline_deterministic(capsys, name):
    outs = []
    for _ in range(2):
        step = []
        for cmd in ("check", "graph"):
            code, out, _ = run(capsys, cmd, fx(name))
            assert code == 0
            step.append(out)
        if name == "g3s_example":
            code, out, _ = run(capsys, "annotate", fx(name))
            assert code == 0
            step.append(out)
        outs.append(step)
    assert outs[0] == outs[1]


def test_check_negative(capsys):
    code, out, _ = run(capsys, "check", "--variant", "g3lp", fx("g3s_realization"))
    assert code == 1 and not json.loads(out)["ok"]


def test_cycle_and_transforms(capsys):
    assert run(capsys, "cycle", "--left-only", fx("g3s_example"))[0] == 0
    code, out, _ = run(capsys, "elim-boxcut", fx("g3lp_projection"))
    assert code == 0 and json.loads(out)["violations"] == []
    code, out, _ = run(capsys, "project", fx("g3lp_example"))
    d = json.loads(out)
    assert code == 0 and d["single_valued"] and d["edge_violations"] == []


def test_lp_commands(capsys):
    code, out, _ = run(capsys, "inputs", fx("g3lp_example"))
    assert code == 0 and json.loads(out)["cs"] == ["t:(P & ~(t*x):P -> P)"]
    code, out, _ = run(capsys, "selfref", fx("g3lp_example"))
    assert code == 0 and json.loads(out)["verdict"] == "Direct"
    code, _, _ = run(capsys, "selfref", "--set", "x:P, y:(x:P -> Q)")
    assert code == 1
    code, out, _ = run(capsys, "realize-apply", "~[-0](P & ~[+0]P)", "⊟0=x", "⊞0=t*x")
    assert code == 0 and json.loads(out)["formula"] == "~x:(P & ~(t*x):P)"


def test_check_hilbert(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"steps": [{"formula": "x:P -> P", "rule": "axiom"},
                                       {"formula": "c:(x:P -> P)", "rule": "nec", "refs": [0]}]}))
    code, out, _ = run(capsys, "check-hilbert", str(f))
    assert code == 0 and json.loads(out)["cs"] == ["c:(x:P -> P)"]


def test_kripke(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"worlds": [0], "relation": [[0, 0]], "valuation": {}}))
    assert run(capsys, "kripke", "eval", str(f), "[](P & ~[]P -> P) -> P")[0] == 1
    assert run(capsys, "kripke", "eval", str(f), "[](P & ~[]P -> P)")[0] == 0


def test_input_errors(capsys):
    code, _, err = run(capsys, "parse", "P &&")
    assert code == 3 and "ParseError" in err
    assert run(capsys, "check", "/no/such/file.json")[0] == 3
    assert run(capsys, "nonsense")[0] == 3


def test_text_format_and_output_file(capsys, tmp_path):
    code, out, _ = run(capsys, "--format", "text", "annotate", fx("g3s_example"))
    assert code == 0 and "⊃ ¬⊟0(P ∧ ¬⊞0P)" in out
    target = tmp_path / "p.json"
    assert run(capsys, "prove", "-o", str(target), "=> P -> P")[0] == 0
    assert json.loads(target.read_text())["result"] == "Proved"


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "--format", "text", "selftest", "--criteria", "1,2,4")
    assert code == 0 and out.count("[PASS]") == 3
