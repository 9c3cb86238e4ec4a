"""Shared fixtures: standard scenario runs are expensive (20k steps each),
so they are executed once per session, wall-clock timed, and shared across
test modules."""

import time
from dataclasses import dataclass

import pytest

import toolbench as tb


@dataclass
class TimedRun:
    result: object
    seconds: float


def timed(config):
    t0 = time.perf_counter()
    res = tb.run_scenario(config)
    return TimedRun(res, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def standard_timed():
    """TimedRun per standard flat mode, single execution each."""
    return {mode: timed(tb.flat_scenario(mode)) for mode in ["A", "B", "C", "D", "VF", "SC"]}


@pytest.fixture(scope="session")
def standard_runs(standard_timed):
    return {mode: tr.result for mode, tr in standard_timed.items()}


@pytest.fixture(scope="session")
def hybrid_timed():
    return timed(tb.hybrid_flat_scenario())


@pytest.fixture(scope="session")
def downhole_timed():
    return timed(tb.downhole_scenario())


@pytest.fixture(scope="session")
def downhole_run(downhole_timed):
    return downhole_timed.result


@pytest.fixture(scope="session")
def hybrid_run(hybrid_timed):
    return hybrid_timed.result
