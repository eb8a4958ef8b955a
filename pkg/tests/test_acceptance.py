"""The fifteen acceptance criteria, each at its stated tolerance.

Every criterion prints one ``[PASS]``/``[FAIL]`` line (run with ``-s``).
"""
import pytest

from shuffling.verify import CHECKS, run_check


@pytest.mark.parametrize("number", sorted(CHECKS), ids=[f"criterion_{n:02d}" for n in sorted(CHECKS)])
def test_criterion(number):
    result = run_check(number)
    print(result.line())
    assert result.ok, result.detail


def test_all_criteria_registered():
    assert sorted(CHECKS) == list(range(1, 16))
