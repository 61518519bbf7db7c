"""The thirteen acceptance criteria, one line of output per criterion.

The lines are repeated in the terminal summary of every run.
"""
import pytest

from sl2harmonic.acceptance import N_CHECKS, run_check


@pytest.mark.slow
@pytest.mark.parametrize("idx", range(1, N_CHECKS + 1))
def test_criterion(idx, record_property):
    res = run_check(idx, seed=7)
    print(res.line())
    record_property("acceptance", res.line())
    assert res.passed, res.line()
    assert res.in_budget, res.line()
