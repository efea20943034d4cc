import math

import pytest

from parabolic_metrics.geometry import ParaboloidModel


@pytest.fixture
def unit():
    return ParaboloidModel(1.0)


def rel_err(value, reference):
    return abs(value - reference) / max(abs(reference), 1e-300)


def close(p, q, tol=1e-12):
    return all(math.isclose(x, y, rel_tol=tol, abs_tol=tol) for x, y in zip(p, q))


# acceptance outcomes, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
