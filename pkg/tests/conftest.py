import numpy as np
import pytest

from dkcalc.complex_core import LatticeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def p3():
    return LatticeSpec.periodic(3)


@pytest.fixture
def p2():
    return LatticeSpec.periodic(2)


@pytest.fixture
def g2():
    return LatticeSpec.ghost(2)


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request, capsys):
    """Return a recorder that prints one PASS/FAIL line per acceptance criterion."""

    def record(number, name, passed, detail=""):
        line = f"[acceptance] criterion {number:>3}  {'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip()
        request.config.stash[ACCEPTANCE_KEY].append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
