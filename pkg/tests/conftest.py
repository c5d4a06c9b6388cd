"""Shared fixtures: materials and cached scenario runs.

The heavyweight scenario runs are session-scoped so the acceptance tests and
the module tests can share one run each.
"""
from __future__ import annotations

import numpy as np
import pytest

from epwave.cese1d import run
from epwave.material import copper
from epwave.scenarios import (builtin_configs, build_scenario, config_from_dict,
                              snapshot_from_level)


@pytest.fixture(scope="session")
def mat():
    return copper()


class ScenarioRun:
    """A completed scenario run with its snapshot history."""

    def __init__(self, name: str, snapshot_every: int = 10):
        self.config = config_from_dict(builtin_configs()[name])
        self.material = self.config.material
        level, bc = build_scenario(self.config)
        self.snapshots = []

        def callback(lv, step_index):
            self.snapshots.append(snapshot_from_level(lv, self.material))

        self.final, self.steps, self.cfl_max = run(
            level, self.config.time.t_end, bc, self.config.solver,
            self.material, callback=callback, snapshot_every=snapshot_every)
        self.final_snapshot = snapshot_from_level(self.final, self.material)

    def snapshots_after(self, t_min: float):
        return [s for s in self.snapshots if s.time >= t_min]


@pytest.fixture(scope="session")
def impact40_run():
    return ScenarioRun("impact40")


@pytest.fixture(scope="session")
def impact40_direct_run():
    return ScenarioRun("impact40_direct")


@pytest.fixture(scope="session")
def finite_bar_run():
    return ScenarioRun("finite_bar")


@pytest.fixture(scope="session")
def multiyield_runs():
    return {name: ScenarioRun(name, snapshot_every=20)
            for name in ("impact30_case1", "impact30_case2", "impact30_case3")}


class ProbeRun:
    """A completed run with a pointwise velocity time series at a probe."""

    def __init__(self, name: str, probe_x: float):
        self.config = config_from_dict(builtin_configs()[name])
        self.material = self.config.material
        level, bc = build_scenario(self.config)
        j = int(round(probe_x / self.config.dx))
        times: list[float] = []
        vels: list[float] = []

        def callback(lv, step_index):
            times.append(lv.t)
            vels.append(lv.u[j, 1] / lv.u[j, 0])

        self.final, self.steps, self.cfl_max = run(
            level, self.config.time.t_end, bc, self.config.solver,
            self.material, callback=callback, snapshot_every=2)
        self.times = np.asarray(times)
        self.velocity = np.asarray(vels)


@pytest.fixture(scope="session")
def ultrasonic_probe():
    return ProbeRun("ultrasonic", probe_x=1.1)


@pytest.fixture(scope="session")
def ultrasonic_subyield_probe():
    return ProbeRun("ultrasonic_subyield", probe_x=1.1)
