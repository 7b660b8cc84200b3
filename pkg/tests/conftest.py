import pytest

from pastfair import _backend

BACKENDS = sorted(_backend.BACKENDS)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def ex1_items():
    from pastfair.allocator import Item

    return [Item("cake", {"Alice": 0.2, "Bob": 0.3}), Item("donut", {"Alice": 0.5, "Bob": 0.5})]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
