from __future__ import annotations

import pytest

from toa.core import GaussianPacket, MomentumGrid, as_state, discretize

# Filled by the acceptance tests; printed at the end of the session.
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def ref_packet():
    return GaussianPacket(x0=-5.0, k0=20.0, delta=0.5)


@pytest.fixture(scope="session")
def ref_state(ref_packet):
    return as_state(ref_packet)


@pytest.fixture(scope="session")
def ref_symmetric_state(ref_packet):
    """reference packet on a grid that also covers k < 0."""
    return discretize(ref_packet, MomentumGrid(-40.0, 40.0, 8001))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
