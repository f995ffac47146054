import pytest

from geac.oscillator import PolynomialOscillator

# independent reference values (sympy, exact rational arithmetic on the coefficients)
CUBIC = (0.2649, -0.0503, -0.04414)
CUBIC_VARIANT = (0.2649, -0.0603, -0.04414)
DAMPING = 4.42e-4
D1, D3 = -3.0849332938077514, 1.9453773354932973
D1_VARIANT, D3_VARIANT = -3.2262648756, 1.8601570369
V1, V3 = 0.753312998386771, 0.219767878823964
DF1, DF3 = -0.684972144678530, -0.431947520024687


@pytest.fixture
def cubic():
    return PolynomialOscillator(DAMPING, CUBIC)


@pytest.fixture
def cubic_undamped():
    return PolynomialOscillator(0.0, CUBIC)


@pytest.fixture
def cubic_variant():
    return PolynomialOscillator(DAMPING, CUBIC_VARIANT)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
