import sys

import numpy as np
import pytest

from yieldsurv.ingest import Recording
from yieldsurv.synthetic import demo_geometry, ramp_fixture


@pytest.fixture
def geometry():
    return demo_geometry()


@pytest.fixture
def ramp_recording():
    return Recording(1, 25.0, (ramp_fixture(),))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
