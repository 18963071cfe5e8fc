"""Plain-text LP dump parsing."""

import math

import pytest

from ctplan import GE, LE, LpStatus, MilpProblem, ParseError, solve_lp, solve_milp
from ctplan.lpformat import parse_lp_dump


def test_basic_dump():
    parsed = parse_lp_dump("""
    # toy problem
    min: -1*x0 + -2*x1
    1*x0 + 1*x1 <= 1
    x0 in [0, inf]
    x1 in [0, inf]
    """)
    assert parsed.problem.num_vars == 2
    assert parsed.binaries == ()
    sol = solve_lp(parsed.problem)
    assert sol.status == LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(-2.0)


def test_binaries_and_bare_terms():
    parsed = parse_lp_dump("""
    min: -x0 + -x1
    x0 + x1 <= 1
    bin: x0 x1
    """)
    assert parsed.binaries == (0, 1)
    assert parsed.problem.var_bounds[0] == (0.0, 1.0)
    sol = solve_milp(MilpProblem.build(parsed.problem, parsed.binaries))
    assert sol.objective == pytest.approx(-1.0)


def test_senses_and_free_default():
    parsed = parse_lp_dump("min: 1*x0\n1*x0 >= 1.5\n")
    assert parsed.problem.constraints[0].sense == GE
    assert parsed.problem.var_bounds[0] == (-math.inf, math.inf)
    assert solve_lp(parsed.problem).objective == pytest.approx(1.5)


def test_equality_and_negative_bounds():
    parsed = parse_lp_dump("""
    min: 2*x0 + 1*x1
    1*x0 + -1*x1 = 0.5
    x0 in [-1, 1]
    x1 in [-inf, 0]
    """)
    sol = solve_lp(parsed.problem)
    assert sol.status == LpStatus.OPTIMAL


@pytest.mark.parametrize("text", [
    "nonsense line",
    "min: 1*x0\nmin: 2*x0",
    "min: 1*y0",
    "1*x0 <= foo",
    "x0 in [1, 2",
    "bin: q3",
    "",
])
def test_bad_dumps_rejected(text):
    with pytest.raises(ParseError):
        parse_lp_dump(text)


def test_leftover_tokens_rejected():
    with pytest.raises(ParseError):
        parse_lp_dump("min: 1*x0 junk\n1*x0 <= 1")
