import numpy as np
import pytest

from shielded_ka.bits import as_bits


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def b(text):
    return as_bits(text)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
