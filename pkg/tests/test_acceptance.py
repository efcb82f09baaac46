"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import pytest

from prehist.acceptance import CRITERIA


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    outcome = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + outcome.line())
    for f in outcome.findings:
        print(f)
    assert outcome.passed, outcome.detail
