"""LP solver: spec'd examples, classification, and the vertex-oracle sweep."""

import math

import numpy as np
import pytest

from ctplan import (EQ, GE, LE, LinearConstraint, LpProblem, LpStatus,
                    ProblemError, SolverOptions, solve_lp)

INF = math.inf


def lp(n, c, rows, bounds):
    return LpProblem.build(n, c, [LinearConstraint.of(*r) for r in rows], bounds)


def test_single_active_bound():
    sol = solve_lp(lp(1, [1.0], [([(0, 1.0)], GE, 1.0)], [(-INF, INF)]))
    assert sol.status == LpStatus.OPTIMAL
    assert sol.values[0] == pytest.approx(1.0, abs=1e-9)
    assert sol.objective == pytest.approx(1.0, abs=1e-9)


def test_triangle_vertex_optimum():
    # min -x - 2y over the triangle x + y <= 1, x, y >= 0.
    problem = lp(2, [-1.0, -2.0], [([(0, 1.0), (1, 1.0)], LE, 1.0)],
                 [(0.0, INF), (0.0, INF)])
    # Enumerate the three vertices by hand as the oracle.
    vertices = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    best = min(-x - 2 * y for x, y in vertices)
    sol = solve_lp(problem)
    assert sol.status == LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(best, abs=1e-9)
    assert tuple(np.round(sol.values, 9)) == (0.0, 1.0)


def test_empty_feasible_set():
    problem = lp(1, [0.0], [([(0, 1.0)], GE, 1.0), ([(0, 1.0)], LE, 0.0)],
                 [(-INF, INF)])
    assert solve_lp(problem).status == LpStatus.INFEASIBLE


def test_unbounded_ray():
    assert solve_lp(lp(1, [-1.0], [], [(0.0, INF)])).status == LpStatus.UNBOUNDED


def test_bounds_only_problem():
    sol = solve_lp(lp(2, [-1.0, 2.0], [], [(0.0, 3.0), (-2.0, 5.0)]))
    assert sol.status == LpStatus.OPTIMAL
    assert tuple(sol.values) == (3.0, -2.0)
    assert sol.objective == pytest.approx(-7.0)


def test_equality_with_free_variables():
    sol = solve_lp(lp(2, [1.0, 1.0], [([(0, 1.0), (1, 1.0)], EQ, 2.0)],
                      [(-INF, INF), (-INF, INF)]))
    assert sol.status == LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(2.0, abs=1e-9)
    assert sum(sol.values) == pytest.approx(2.0, abs=1e-9)


def test_degenerate_equalities():
    # Redundant duplicated equality rows must not upset phase I.
    rows = [([(0, 1.0), (1, 1.0)], EQ, 1.0), ([(0, 2.0), (1, 2.0)], EQ, 2.0)]
    sol = solve_lp(lp(2, [1.0, 0.0], rows, [(0.0, INF), (0.0, INF)]))
    assert sol.status == LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(0.0, abs=1e-9)


class TestValidation:
    def test_nan_coefficient(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [float("nan")], [], [(0.0, 1.0)]))

    def test_nan_in_row(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [1.0], [([(0, float("nan"))], LE, 1.0)], [(0.0, 1.0)]))

    def test_index_out_of_range(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [1.0], [([(3, 1.0)], LE, 1.0)], [(0.0, 1.0)]))

    def test_inverted_bounds(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [1.0], [], [(2.0, 1.0)]))

    def test_bad_sense(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [1.0], [([(0, 1.0)], "<", 1.0)], [(0.0, 1.0)]))

    def test_bad_tolerances(self):
        with pytest.raises(ProblemError):
            solve_lp(lp(1, [1.0], [], [(0.0, 1.0)]), SolverOptions(feas_tol=0.0))


def test_determinism(box_lp_generator):
    rng = np.random.default_rng(7)
    problem, _, _, _ = box_lp_generator(rng, n=5, m=5)
    a = solve_lp(problem)
    b = solve_lp(problem)
    assert a.status == b.status and a.iterations == b.iterations
    assert np.array_equal(a.values, b.values)


def test_phase_one_point_feasible(box_lp_generator):
    # Whenever phase I declares feasibility, the returned point satisfies
    # every constraint within tolerance.
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 40:
        problem, rows, lo, hi = box_lp_generator(rng)
        sol = solve_lp(problem)
        if sol.status != LpStatus.OPTIMAL:
            continue
        checked += 1
        x = sol.values
        for coefs, sense, rhs in rows:
            act = float(np.asarray(coefs) @ x)
            if sense == LE:
                assert act <= rhs + 1e-6 * (1 + abs(rhs))
            elif sense == GE:
                assert act >= rhs - 1e-6 * (1 + abs(rhs))
        assert (x >= lo - 1e-6).all() and (x <= hi + 1e-6).all()


def test_matches_vertex_enumeration(box_lp_generator, vertex_oracle):
    rng = np.random.default_rng(23)
    for _ in range(60):
        problem, rows, lo, hi = box_lp_generator(rng)
        expected_obj, _ = vertex_oracle(problem.objective, rows, lo, hi)
        sol = solve_lp(problem)
        if expected_obj is None:
            assert sol.status == LpStatus.INFEASIBLE
        else:
            assert sol.status == LpStatus.OPTIMAL
            assert sol.objective == pytest.approx(expected_obj, abs=1e-6)
