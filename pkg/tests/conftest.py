import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mbp4.codes import CheckMatrix, Code, gen_five_qubit, gen_surface, gen_toric

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# two-check toy code used to illustrate the ZI / IZ ambiguity
TOY_ROWS = ("XY", "ZZ")

# L=7 surface error patterns with a known degenerate decoding
PATTERN_A = "X4 Z15 Z16 Y23 Z33 Y39 Y40"
PATTERN_D = "X4 X6 X7 Z15 Z16 Y23 Z33 Y39 Y40"


@pytest.fixture(scope="session")
def five():
    return gen_five_qubit()


@pytest.fixture(scope="session")
def surf3():
    return gen_surface(3)


@pytest.fixture(scope="session")
def surf5():
    return gen_surface(5)


@pytest.fixture(scope="session")
def surf7():
    return gen_surface(7)


@pytest.fixture(scope="session")
def toric4():
    return gen_toric(4)


@pytest.fixture(scope="session")
def toy():
    return Code(CheckMatrix(list(TOY_ROWS)), name="toy")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
