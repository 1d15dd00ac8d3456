import numpy as np
import pytest

from disham.geometry import ExtendedPhasePoint, MetricSpace, configuration_surface
from disham.hamiltonian import constant_step_pair


@pytest.fixture
def line():
    """One-dimensional Euclidean space with the surface q = 0."""
    space = MetricSpace.euclidean(1)
    return space, configuration_surface([0.0], [1.0], space)


@pytest.fixture
def step(line):
    """Factory for unit-mass constant potential steps across q = 0."""
    space, surface = line

    def make(U_minus, U_plus, mass=1.0):
        return constant_step_pair(space, mass, U_minus, U_plus, surface)

    return make


def free_start(q, p, mass=1.0, level=0.0, t=0.0):
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return ExtendedPhasePoint(q, p, t, float(p @ p) / (2.0 * mass) + level)


# acceptance criteria outcomes, printed once at the end of the session
ACCEPTANCE = {}


def record(number: int, title: str, checks: dict) -> bool:
    """Store the outcome of one acceptance criterion; returns overall success."""
    failed = [name for name, ok in checks.items() if not ok]
    ACCEPTANCE[number] = (title, not failed, failed)
    return not failed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, failed = ACCEPTANCE[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += "  [failed: " + "; ".join(failed) + "]"
        terminalreporter.write_line(line)
