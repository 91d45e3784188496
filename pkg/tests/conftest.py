import numpy as np
import pytest

from cliffordlab import ModeSpace


@pytest.fixture(scope="session")
def space1() -> ModeSpace:
    return ModeSpace(1)


@pytest.fixture(scope="session")
def space2() -> ModeSpace:
    return ModeSpace(2)


@pytest.fixture(scope="session")
def space3() -> ModeSpace:
    return ModeSpace(3)


@pytest.fixture(scope="session")
def space4() -> ModeSpace:
    return ModeSpace(4)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)


# --------------------------------------------------------------------- #
# acceptance reporting: one pass/fail line per criterion, printed in the
# terminal summary so the lines survive pytest's output capture

ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def criterion():
    def report(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((number, bool(ok), detail))
        assert ok, f"criterion {number} failed: {detail}"
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status} - {detail}")
