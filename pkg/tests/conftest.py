import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance_line(request):
    """Record one ``PASS ACn: ...`` / ``FAIL ACn: ...`` line for the run summary."""
    lines = request.config.stash[_LINES]

    def record(text: str) -> None:
        lines.append(text)
        print(text)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in sorted(lines, key=lambda s: int(s.split("AC", 1)[1].split(":", 1)[0])):
            terminalreporter.write_line(text)
