"""The twenty acceptance criteria, one test each.

Every criterion prints a ``PASS NN title`` or ``FAIL NN title`` line; the
lines are repeated together in the terminal summary.
"""

from __future__ import annotations

import pytest

from momentgrowth.checks import CHECKS, run_check

RESULTS: list[str] = []


@pytest.mark.parametrize("number", sorted(CHECKS), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    result = run_check(number)
    line = result.line()
    RESULTS.append(line)
    print(line)
    assert result.passed, f"{line}: {result.detail}"


def test_all_criteria_present():
    assert sorted(CHECKS) == list(range(1, 21))
