import pytest

from vdwmedia.materials import AtomModel, MaterialModel, OscillatorTerm
from vdwmedia.planar_optics import HalfSpacePair

# Acceptance verdicts collected during the run, printed in the terminal summary.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def osc(strength, resonance, damping=0.0):
    return OscillatorTerm(strength, resonance, damping)


@pytest.fixture
def vacuum():
    return MaterialModel(name="vacuum")


@pytest.fixture
def dielectric():
    return MaterialModel((osc(2.0, 1.5),), name="dielectric")


@pytest.fixture
def water_like():
    return MaterialModel((osc(1.0, 1.0), osc(0.5, 4.0, 0.3)), name="water-like")


@pytest.fixture
def magnetic():
    return MaterialModel((osc(1.5, 2.0),), (osc(0.5, 0.5),), name="magnetic")


@pytest.fixture
def atom():
    return AtomModel(1.0, 1.0, "A")


@pytest.fixture
def dispersive_pair(water_like, magnetic):
    return HalfSpacePair(water_like, magnetic)
