"""Risk-sensitive sequential action control."""

import json

from . import _core
from ._core import (
    RssacError,
    entropic_risk,
    euler_step,
    optimal_action,
    parse_trajectory_file,
    risk_weights,
    set_worker_count,
    worker_count,
)

__all__ = [
    "RssacError",
    "entropic_risk",
    "euler_step",
    "load_config",
    "normalize_config",
    "optimal_action",
    "parse_trajectory_file",
    "risk_weights",
    "run_benchmark",
    "run_episode",
    "set_worker_count",
    "worker_count",
]


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def normalize_config(config=None):
    """Validated config with every default filled in."""
    return json.loads(_core.normalize_config(_text(config)))


def load_config(path):
    return json.loads(_core.load_config(str(path)))


def run_episode(config=None, controller="", seed=0):
    """One seeded episode; the state log rows are t, px, py, vx, vy, ux, uy, min_distance."""
    return json.loads(_core.run_episode(_text(config), controller, seed))


def run_benchmark(config=None, controller="", runs=1, seed=0):
    return json.loads(_core.run_benchmark(_text(config), controller, runs, seed))
