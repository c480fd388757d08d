import pytest

from ising_tau.painleve3 import integrate_inward

ACCEPTANCE_LINES = {}


def record_acceptance(number, title, passed, detail):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def acceptance():
    return record_acceptance


@pytest.fixture(scope="session")
def painleve():
    return integrate_inward(10.0, 0.05)


@pytest.fixture(scope="session")
def two_point_r2():
    from ising_tau.spinor_solver import PointConfiguration, solve_spinors

    return solve_spinors(PointConfiguration((0.0, 2.0)), -1.0)


@pytest.fixture(scope="session")
def three_point():
    from ising_tau.spinor_solver import PointConfiguration, solve_spinors

    return solve_spinors(PointConfiguration((0.0, 1.0 + 0.5j, -0.3 + 1.2j)), -0.8)
