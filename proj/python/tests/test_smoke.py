import math

import pytest

import rssac


def test_entropic_risk_reduces_to_mean():
    costs = [1.0, 2.0, 4.0]
    assert rssac.entropic_risk(costs, 0.0) == pytest.approx(7.0 / 3.0)
    expected = math.log(sum(math.exp(0.5 * c) for c in costs) / 3.0) / 0.5
    assert rssac.entropic_risk(costs, 0.5) == pytest.approx(expected, rel=1e-12)
    w = rssac.risk_weights(costs, 1.0)
    assert sum(w) == pytest.approx(1.0)
    assert w[2] > w[1] > w[0]


def test_optimal_action_respects_the_bound():
    v, mig = rssac.optimal_action([0, 0, 10.0, -3.0], [0, 0, 0, 0], [0.0, 0.0], 0.2, 5.0)
    assert math.hypot(v[0], v[1]) <= 5.0 + 1e-12
    assert mig <= 0.0


def test_euler_step():
    x = rssac.euler_step([0.0, 0.0, 1.0, 2.0], [1.0, 0.0], 0.1)
    assert list(x) == pytest.approx([0.1, 0.2, 1.1, 2.0])


def test_default_config_is_the_intersection():
    cfg = rssac.normalize_config()
    assert cfg["scenario"]["kind"] == "intersection"
    assert cfg["cost"]["alpha"] == 100.0
    assert rssac.normalize_config(cfg) == cfg


def test_invalid_config_names_the_field():
    with pytest.raises(ValueError, match="rssac.sigma"):
        rssac.normalize_config({"rssac": {"sigma": "high"}})


def test_run_episode_is_deterministic():
    cfg = {"scenario": {"duration": 3.0}}
    a = rssac.run_episode(cfg, "rssac", seed=4)
    b = rssac.run_episode(cfg, "rssac", seed=4)
    for key in ("min_robot_human_distance", "normalized_goal_distance", "collided", "yielded", "log"):
        assert a[key] == b[key]
    assert len(a["log"]) == 151
    assert a["normalized_goal_distance"] < 1.0


def test_run_benchmark_statistics():
    out = rssac.run_benchmark({"scenario": {"duration": 2.0}}, "zero", runs=3, seed=1)
    assert out["controller"] == "zero"
    assert len(out["episodes"]) == 3
    dist = [e["min_robot_human_distance"] for e in out["episodes"]]
    assert out["stats"]["min_robot_human_distance"]["mean"] == pytest.approx(sum(dist) / 3)


def test_trajectory_parsing():
    rows = rssac.parse_trajectory_file("# comment\n2 1 0.5 1.0\n1 1 0.0 1.0\n")
    assert rows == [(1, 1, 0.0, 1.0), (2, 1, 0.5, 1.0)]
    with pytest.raises(ValueError, match="line 1"):
        rssac.parse_trajectory_file("1 1 0.0\n")


def test_worker_count_override():
    rssac.set_worker_count(2)
    assert rssac.worker_count() == 2
    rssac.set_worker_count(0)
    assert rssac.worker_count() >= 1
