import mpmath as mp
import pytest

from diagising.series.gseries import series_family
from diagising.series.solvers import solve_sigma0

_VERDICTS = {}


def record_verdict(number, passed, detail, label=None):
    """Store the verdict of an acceptance criterion for the terminal summary."""
    _VERDICTS[number] = (label or ("PASS" if passed else "FAIL"), detail)
    print(f"criterion {number}: {_VERDICTS[number][0]} {detail}")


@pytest.fixture
def verdict():
    return record_verdict


@pytest.fixture(scope="session")
def family30():
    return {r: series_family(30, r) for r in ("high", "low")}


@pytest.fixture(scope="session")
def sigma0_deep():
    # the sigma0 series converges in s*|L|; residual checks at s = 0.3 need ~76 orders
    return {r: solve_sigma0(76, r) for r in ("high", "low")}


@pytest.fixture(autouse=True)
def _restore_mp():
    # literals in tests are parsed well above the working precision
    dps = mp.mp.dps
    mp.mp.dps = 80
    yield
    mp.mp.dps = dps


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        label, detail = _VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {label:8s} {detail}")
