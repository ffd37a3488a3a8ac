import numpy as np
import pytest

from kaczopt import row_normalize

ACCEPTANCE_LINES = []


def random_unit_rows(rng, m, n):
    return row_normalize(rng.standard_normal((m, n))).B


def random_system(rng, m, n):
    """Rows with random directions and random positive norms, plus a solution."""
    A = rng.standard_normal((m, n)) * rng.uniform(0.2, 3.0, size=(m, 1))
    x = rng.standard_normal(n)
    return A, x, A @ x


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
