"""Replay and brute-force oracles."""

import dataclasses
import math

import numpy as np
import pytest

from ctplan import (PlannerError, PlanningConfig, PlanningMode, TrajectoryPlan,
                    brute_force_plan, min_time_search, replay, solve_milp,
                    build_collision_tolerant, with_effort_objective,
                    MilpProblem, MilpStatus)


def make_plan(config, x, v, a, zeta=None, damage=None, mode=PlanningMode.COLLISION_FREE):
    tau = len(x) - 1
    zeta = zeta or (0,) * (tau + 1)
    damage = damage or (0.0,) * (tau + 1)
    return TrajectoryPlan(config.dt, tau, tuple(x), tuple(v), tuple(a),
                          tuple(zeta), tuple(damage), float(sum(damage)),
                          mode, config)


def test_equilibrium_replay():
    config = PlanningConfig(
        x_init=0.5, v_init=0.0, a_init=0.0, x_g=0.5, v_final=0.0, a_final=0.0,
        x_w=0.0, dt=0.05, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)
    n = 11
    plan = make_plan(config, [0.5] * n, [0.0] * n, [0.0] * n)
    result = replay(plan, config)
    assert result.passed
    assert result.max_dynamics_residual == 0.0


def test_constant_acceleration_closed_form():
    # Constant thrust from rest: the half-step update integrates t^2/2 exactly.
    config = PlanningConfig(
        x_init=0.0, v_init=0.0, a_init=6.0, x_g=3.0, v_final=6.0, a_final=6.0,
        x_w=-10.0, dt=0.05, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)
    dt, steps, acc = 0.05, 20, 6.0
    x = [0.5 * acc * (t * dt) ** 2 for t in range(steps + 1)]
    v = [acc * t * dt for t in range(steps + 1)]
    a = [acc] * (steps + 1)
    assert v[-1] == pytest.approx(6.0, abs=1e-12)
    assert x[-1] - x[0] == pytest.approx(3.0, abs=1e-12)
    result = replay(make_plan(config, x, v, a), config)
    assert result.passed
    assert result.worst() <= 1e-12


def test_dimension_mismatch_rejected(small_config):
    plan = make_plan(small_config, [1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    bad = dataclasses.replace(plan, x=(1.0,))
    with pytest.raises(PlannerError):
        replay(bad, small_config)


def test_dt_mismatch_rejected(small_config):
    plan = make_plan(small_config, [1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(PlannerError):
        replay(plan, dataclasses.replace(small_config, dt=0.05))


def test_violations_are_reported():
    config = PlanningConfig(
        x_init=0.5, v_init=0.0, a_init=0.0, x_g=0.5, v_final=0.0, a_final=0.0,
        x_w=0.0, dt=0.05, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)
    plan = make_plan(config, [0.5, 0.4], [0.0, 0.0], [9.0, 0.0])
    result = replay(plan, config)
    assert not result.passed
    assert result.max_dynamics_residual > 1e-6  # position does not integrate
    assert result.family_violations["saturation"] == pytest.approx(3.0)


def test_brute_force_guard():
    config = PlanningConfig(
        x_init=1.0, v_init=0.0, a_init=0.0, x_g=0.1, v_final=0.0, a_final=0.0,
        x_w=0.0, dt=0.1, a_max=6.0, a_min=-6.0, v_max=15.0, restitution=0.0)
    with pytest.raises(PlannerError):
        brute_force_plan(config, 13)


def test_scaled_down_min_tau_agreement(small_config):
    # Brute force over contact patterns finds the same minimum horizon as the
    # MILP-backed search.
    brute_min = next(tau for tau in range(1, 12)
                     if brute_force_plan(small_config, tau).feasible)
    plan = min_time_search(small_config, PlanningMode.COLLISION_TOLERANT)
    assert plan.tau == brute_min


def test_infeasible_horizon_full_agreement(paper_config):
    result = brute_force_plan(paper_config, 5)
    assert not result.feasible
    problem, _ = build_collision_tolerant(paper_config, 5)
    assert solve_milp(problem).status == MilpStatus.INFEASIBLE


def test_randomized_oracle_equivalence(scenario_generator):
    # A fast slice of the acceptance-scale study: solver and enumeration
    # agree on feasibility and effort objective.
    rng = np.random.default_rng(42)
    for _ in range(20):
        config, tau = scenario_generator(rng)
        brute = brute_force_plan(config, tau)
        problem, lay = build_collision_tolerant(config, tau)
        milp = MilpProblem(with_effort_objective(problem.base, lay),
                           problem.binary_vars)
        sol = solve_milp(milp)
        assert brute.feasible == (sol.status == MilpStatus.OPTIMAL)
        if brute.feasible:
            assert sol.objective == pytest.approx(brute.objective, abs=1e-6)


def test_planner_plans_replay_clean(small_config):
    for mode in (PlanningMode.COLLISION_FREE, PlanningMode.COLLISION_TOLERANT):
        plan = min_time_search(small_config, mode)
        result = replay(plan, small_config)
        assert result.passed, (mode, result)
