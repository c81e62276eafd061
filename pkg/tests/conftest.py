import pytest

from hypercolour import recursion as rc
from hypercolour.spin import params_from_d


@pytest.fixture(scope="session")
def p4():
    return params_from_d(4, 2, 80)


@pytest.fixture(scope="session")
def fixpoints4(p4):
    return {
        "half-half": rc.solve_half_half(p4),
        "q00-sym": rc.symmetric_q00_fixpoint(p4),
        "q00-asym": rc.asymmetric_q00_fixpoint(p4),
    }


@pytest.fixture(scope="session")
def p63():
    return params_from_d(6, 3, 1080)


@pytest.fixture(scope="session")
def landmarks63(p63):
    from hypercolour.scalar import landmarks
    return landmarks(p63)


@pytest.fixture(scope="session")
def intersection63(p63):
    from hypercolour.scalar import find_intersection_near_diagonal
    return find_intersection_near_diagonal(p63)


@pytest.fixture(scope="session")
def dominance4(p4):
    from hypercolour.phi import dominant_search
    return dominant_search(p4)


_ACCEPTANCE = {}


@pytest.fixture
def record():
    """record(n, ok, detail) logs one acceptance criterion for the summary."""
    def _record(n, ok, detail=""):
        _ACCEPTANCE[n] = (bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
