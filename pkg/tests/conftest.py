import pytest

from modsep import make_field

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Append one PASS/FAIL line for an acceptance criterion."""

    def _record(criterion: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} {criterion}"
        if detail:
            line += f": {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


@pytest.fixture(scope="session")
def F2():
    return make_field(2, 1)


@pytest.fixture(scope="session")
def F3():
    return make_field(3, 1)


@pytest.fixture(scope="session")
def F4():
    return make_field(2, 2)


@pytest.fixture(scope="session")
def F5():
    return make_field(5, 1)


@pytest.fixture(scope="session")
def F9():
    return make_field(3, 2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
