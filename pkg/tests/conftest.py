import numpy as np
import pytest

from gpc.constructions import (
    m4_example2_decomposition,
    mub_masa_decomposition,
    qubit_pauli_decomposition,
)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def qubit():
    return qubit_pauli_decomposition()


@pytest.fixture(scope="session")
def m4():
    return m4_example2_decomposition()


@pytest.fixture(scope="session")
def mub3():
    return mub_masa_decomposition(3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
