import time

import numpy as np
import pytest

from braitenberg3a import IntegratorConfig, ParabolicStimulus, VehicleConfig

ACCEPTANCE_LINES = []
ACCEPTANCE_VERDICTS = {}  # criterion number -> list of bools
_START = time.perf_counter()


@pytest.fixture
def field():
    return ParabolicStimulus()


@pytest.fixture
def cfg():
    return VehicleConfig()


@pytest.fixture
def long_run():
    return IntegratorConfig(t_max=1000.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20190601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance checks")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_VERDICTS):
        v = ACCEPTANCE_VERDICTS[number]
        verdict = "PASS" if all(v) else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {number:2d}  ({sum(v)}/{len(v)} checks)")
    elapsed = time.perf_counter() - _START
    terminalreporter.write_line(f"{'PASS' if elapsed < 30 else 'FAIL'}  suite runtime {elapsed:.1f} s (target 30 s)")
