import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mlamatch.aperture import build_aperture_model  # noqa: E402
from mlamatch.waveguide import FrequencyPoint, GuideSection  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXAMPLE_CFG = os.path.join(ROOT, "configs", "example.cfg")

# a = 17 mm, b = 11 mm antenna; eps_r is our choice (see configs/example.cfg)
A, B, EPS = 0.017, 0.011, 2.2
F0 = 9.75e9

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def antenna():
    return GuideSection(A, B, 0.0, EPS)


@pytest.fixture(scope="session")
def f0():
    return FrequencyPoint(F0)


@pytest.fixture(scope="session")
def band_model(antenna):
    return build_aperture_model(antenna, np.linspace(9.25e9, 10.25e9, 21))


@pytest.fixture(scope="session")
def example_cfg():
    return EXAMPLE_CFG


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
