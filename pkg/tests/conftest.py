"""Shared fixtures: benchmark configs, random generators, LP vertex oracle."""

import itertools
import math

import numpy as np
import pytest

from ctplan import LE, GE, EQ, LinearConstraint, LpProblem, PlanningConfig


@pytest.fixture(scope="session")
def paper_config():
    """The benchmark wall scenario (10 m approach, goal 0.3 m past origin)."""
    return PlanningConfig(
        x_init=10.0, v_init=0.0, a_init=0.0,
        x_g=0.3, v_final=0.0, a_final=0.0,
        x_w=0.0, dt=0.05, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)


@pytest.fixture(scope="session")
def small_config():
    """A scaled-down wall scenario solvable in well under a second."""
    return PlanningConfig(
        x_init=1.0, v_init=0.0, a_init=0.0,
        x_g=0.05, v_final=0.0, a_final=0.0,
        x_w=0.0, dt=0.1, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)


def random_scenario(rng) -> tuple[PlanningConfig, int]:
    """Random small wall scenario plus a horizon, biased toward short trees."""
    a = float(rng.uniform(2.0, 10.0))
    config = PlanningConfig(
        x_init=float(rng.uniform(0.5, 5.0)), v_init=0.0, a_init=0.0,
        x_g=float(rng.uniform(0.05, 1.0)), v_final=0.0, a_final=0.0,
        x_w=0.0, dt=float(rng.choice([0.05, 0.1])),
        a_max=a, a_min=-a, v_max=15.0, restitution=0.0)
    tau = int(rng.choice([3, 4, 5, 6, 7, 8, 9, 10], p=[.2, .2, .2, .15, .1, .06, .05, .04]))
    return config, tau


@pytest.fixture(scope="session")
def scenario_generator():
    return random_scenario


def vertex_enum_optimum(c, rows, lo, hi, feas_tol=1e-7):
    """Exhaustive vertex enumeration for a box-bounded LP (the test oracle).

    rows: list of (coef_vector, sense, rhs).  Returns (best_objective,
    best_point) or (None, None) when no vertex is feasible (empty region,
    since the box keeps everything bounded).
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    planes = []
    for coefs, sense, rhs in rows:
        planes.append((np.asarray(coefs, dtype=float), float(rhs)))
        if sense == EQ:
            planes.append((-np.asarray(coefs, dtype=float), -float(rhs)))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        planes.append((e.copy(), hi[j]))
        planes.append((-e, -lo[j]))

    combos = list(itertools.combinations(range(len(planes)), n))
    A_all = np.stack([np.stack([planes[i][0] for i in combo]) for combo in combos])
    b_all = np.stack([np.array([planes[i][1] for i in combo]) for combo in combos])
    dets = np.abs(np.linalg.det(A_all))
    keep = dets > 1e-9
    if not keep.any():
        return None, None
    points = np.linalg.solve(A_all[keep], b_all[keep][..., None])[..., 0]

    best_obj, best_x = None, None
    for x in points:
        ok = True
        for coefs, sense, rhs in rows:
            act = float(coefs @ x)
            if sense == LE and act > rhs + feas_tol * (1 + abs(rhs)):
                ok = False
            elif sense == GE and act < rhs - feas_tol * (1 + abs(rhs)):
                ok = False
            elif sense == EQ and abs(act - rhs) > feas_tol * (1 + abs(rhs)):
                ok = False
            if not ok:
                break
        if not ok or (x < lo - feas_tol).any() or (x > hi + feas_tol).any():
            continue
        obj = float(c @ x)
        if best_obj is None or obj < best_obj:
            best_obj, best_x = obj, x
    return best_obj, best_x


@pytest.fixture(scope="session")
def vertex_oracle():
    return vertex_enum_optimum


def random_box_lp(rng, n=None, m=None):
    """Random box-bounded LP instance as (LpProblem, rows, lo, hi)."""
    n = n or int(rng.integers(1, 7))
    m = m if m is not None else int(rng.integers(0, 7))
    c = rng.uniform(-5, 5, size=n)
    lo = rng.uniform(-4, 0, size=n)
    hi = lo + rng.uniform(0.5, 6, size=n)
    rows = []
    for _ in range(m):
        coefs = rng.uniform(-3, 3, size=n)
        sense = [LE, GE][int(rng.integers(0, 2))]
        rhs = float(rng.uniform(-5, 5))
        rows.append((coefs, sense, rhs))
    problem = LpProblem.build(
        n, c,
        [LinearConstraint.of([(j, coefs[j]) for j in range(n)], sense, rhs)
         for coefs, sense, rhs in rows],
        list(zip(lo, hi)))
    return problem, rows, lo, hi


@pytest.fixture(scope="session")
def box_lp_generator():
    return random_box_lp


def max_rest_coverage(k: int, dt: float, a: float) -> float:
    """Largest distance coverable in k zero-order-hold steps, rest to rest.

    Exact for the trapezoidal position update: the best profile is the
    triangular speed ramp with slope a.
    """
    v = [a * dt * min(s, k - s) for s in range(k + 1)]
    return sum(dt * (v[s] + v[s + 1]) / 2.0 for s in range(k))


@pytest.fixture(scope="session")
def rest_coverage():
    return max_rest_coverage
