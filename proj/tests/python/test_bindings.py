import math

import numpy as np
import pytest

import l2e


def test_shaping_matches_plan_reward_decomposition():
    mdp = l2e.PlanMdp(l2e.EnvConfig(l2e.Task.BASIC_PUSHING))
    rng = l2e.Generator(3)
    state, plan = mdp.sample_task(rng)
    assert len(plan) == 50
    assert plan.waypoints.shape == (50, 6)
    assert plan.goal == mdp.env.goal
    step = mdp.shaped_step([0.05, 0.0, -0.1], plan, rng)
    shaping = l2e.fv_shaping(state, [0.05, 0.0, -0.1], step["state"], plan, mdp.shaping)
    assert 0.0 <= shaping <= 0.5
    assert step["reward"] == pytest.approx(
        l2e.plan_reward(state, [0.05, 0.0, -0.1], step["state"], plan, mdp.shaping), abs=0
    )


def test_shaping_is_zero_at_the_goal():
    mdp = l2e.PlanMdp(l2e.EnvConfig(l2e.Task.MAZE))
    state, plan = mdp.sample_task(l2e.Generator(1))
    goal = list(plan.goal)
    assert l2e.fv_shaping(state, [0.0, 0.0], goal, plan, mdp.shaping) == 0.0
    assert l2e.plan_reward(state, [0.0, 0.0], goal, plan, mdp.shaping) == 1.0


def test_plan_text_round_trip():
    mdp = l2e.PlanMdp(l2e.EnvConfig(l2e.Task.OBSTACLE_PUSHING))
    _, plan = mdp.sample_task(l2e.Generator(5))
    assert plan.intermediate is not None
    back = l2e.parse_plan(plan.serialize())
    assert back == plan
    np.testing.assert_array_equal(back.waypoints, plan.waypoints)
    assert len(plan.subsample(12)) == 12


def test_environment_clamps_and_is_seeded():
    env = l2e.make_env(l2e.EnvConfig(l2e.Task.MAZE))
    clamped = env.clamp_action([3.0, 4.0])
    assert math.hypot(*clamped) == pytest.approx(0.1)
    a = l2e.make_env(l2e.EnvConfig(l2e.Task.MAZE))
    b = l2e.make_env(l2e.EnvConfig(l2e.Task.MAZE))
    ra, rb = l2e.Generator(9), l2e.Generator(9)
    assert a.reset(ra) == b.reset(rb)
    for _ in range(10):
        assert a.step([0.05, 0.02], ra) == b.step([0.05, 0.02], rb)


def test_tiny_training_run(tmp_path):
    cfg = l2e.ExperimentConfig.parse(
        """
experiment.env = maze
experiment.total_steps = 600
learner.warmup = 200
eval.interval = 300
eval.rollouts = 2
learner.hidden = 16, 16
learner.batch_size = 16
replay.n = 2
replay.m = 4
"""
    )
    out = tmp_path / "run"
    result = l2e.train(cfg, seed=4, out=str(out))
    assert result["steps"] == 600
    assert result["evals"][0]["step"] == 0
    assert result["evals"][-1]["step"] == 600
    assert (out / "metrics.txt").exists()
    again = l2e.evaluate_checkpoint(str(out / "checkpoint.bin"), rollouts=2, seed=4)
    assert again == result["evals"][-1]["successes"]


def test_bad_config_is_reported():
    with pytest.raises(ValueError, match="line 1"):
        l2e.ExperimentConfig.parse("replay.colour = red\n")


def test_summary():
    s = l2e.summarize([[True, False], [True, True]])
    assert s["mean"] == 0.75
    assert s["agents"] == 2
