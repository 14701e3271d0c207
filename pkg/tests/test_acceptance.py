"""Every acceptance criterion at its stated tolerance and time budget.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line
per criterion (``fdsrank verify all`` prints the same lines).
"""

import pytest

from fdsrank.acceptance import SUITES, run_suite


@pytest.mark.parametrize("name", list(SUITES))
def test_criterion(name):
    result = run_suite(name)
    print(result.line())
    assert result.passed, result.line()
