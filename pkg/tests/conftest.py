import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coopmsr.code import encode, make_params  # noqa: E402


@pytest.fixture(scope="session")
def p6():
    return make_params(6, 3, 2, 4)


@pytest.fixture(scope="session")
def word6(p6):
    msg = np.random.default_rng(2024).integers(0, p6.field.order, p6.k * p6.l)
    return encode(p6, msg)


def random_word(params, seed):
    msg = np.random.default_rng(seed).integers(0, params.field.order, params.k * params.l)
    return encode(params, msg)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
