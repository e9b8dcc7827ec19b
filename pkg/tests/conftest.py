import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from psode.odemodel import parse_soode  # noqa: E402

EX1 = "y'' = (3*x*y'^2 + y*y')/(x*y)"
EX2 = "y'' = -c1*y' - c2*y + beta*y^2"
EX2_PARAMS = ("c1", "c2", "beta")
EX3 = "y'' = -(4 + y^2)*y' - 3*y - y^3"
EX4 = "y'' = -y'^2/(-y-1+3*x*y')"


@pytest.fixture
def ex1():
    return parse_soode(EX1)


@pytest.fixture
def ex3():
    return parse_soode(EX3)


@pytest.fixture
def ex4():
    return parse_soode(EX4)


@pytest.fixture
def ex2_pinned():
    s = parse_soode(EX2, EX2_PARAMS)
    from psode.odemodel import parse_pin

    name, value = parse_pin("c2=6/25*c1^2", EX2_PARAMS)
    return s.substitute({name: value})


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
