"""Acceptance gate: one test per numbered criterion.

Each test prints its PASS/FAIL line with the measured numbers; the lines are
repeated in the terminal summary. Run alone with
``pytest tests/test_acceptance.py -s`` or ``periodic-euler --self-test``.
"""
import pytest

from periodic_euler import acceptance

RESULTS = {}


@pytest.mark.slow
@pytest.mark.parametrize("crit", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(crit, suite):
    res = crit(suite)
    RESULTS[res.number] = res
    print(res.report())
    failed = [f"{c.label}: {c.detail}" for c in res.checks if not c.passed]
    assert res.passed, "; ".join(failed)


if __name__ == "__main__":
    acceptance.run_all(verbose=True)
