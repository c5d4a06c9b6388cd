"""Fixtures: golden file path and freshly generated solver snapshot sets.

The generation step drives the solver package through its public scenario
runner and then touches only the CSV files it leaves behind — the same
boundary an external user of this tool sits at.
"""
from __future__ import annotations

import copy
import os

import pytest

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def golden_path():
    return os.path.join(DATA_DIR, "golden.csv")


@pytest.fixture(scope="session")
def scenario_snapshot_dirs(tmp_path_factory):
    """Snapshot directories for the impact, multi-yield, and forced-end runs."""
    from epwave.cli import run_scenario
    from epwave.scenarios import builtin_configs, config_from_dict

    cadence = {"impact40": 40, "impact30_case1": 100, "impact30_case2": 100,
               "impact30_case3": 100, "ultrasonic": 200}
    dirs: dict[str, str] = {}
    for name, every in cadence.items():
        out = str(tmp_path_factory.mktemp(name))
        data = copy.deepcopy(builtin_configs()[name])
        data.setdefault("output", {})["directory"] = out
        run_scenario(config_from_dict(data), snapshot_every=every)
        dirs[name] = out
    return dirs
