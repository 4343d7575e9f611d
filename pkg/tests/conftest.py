from fractions import Fraction

import numpy as np
import pytest

from qlinksim.basis import SU2, U1, FullSpace, build_physical_basis
from qlinksim.lattice import build_lattice

ACCEPTANCE_RESULTS: dict = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str) -> None:
    """Remember a criterion's outcome and echo it (visible with -s)."""
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_RESULTS[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[k])


@pytest.fixture(scope="session")
def lat22():
    return build_lattice(2, 2)


@pytest.fixture(scope="session")
def u1_full(lat22):
    return FullSpace(lat22, U1(1))


@pytest.fixture(scope="session")
def u1_basis(lat22, u1_full):
    return build_physical_basis(lat22, U1(1), full=u1_full)


@pytest.fixture(scope="session")
def su2_full(lat22):
    return FullSpace(lat22, SU2(Fraction(1, 2)))


@pytest.fixture(scope="session")
def su2_basis(lat22, su2_full):
    return build_physical_basis(lat22, SU2(Fraction(1, 2)), full=su2_full)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
