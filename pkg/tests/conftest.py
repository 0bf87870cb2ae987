import pytest

_VERDICTS: list[tuple[str, bool, str]] = []


class Verdict:
    """Records one acceptance criterion's outcome for the end-of-run summary."""

    def __init__(self, label: str):
        self.label = label

    def __call__(self, passed: bool, detail: str) -> bool:
        _VERDICTS.append((self.label, bool(passed), detail))
        return bool(passed)


@pytest.fixture
def verdict(request):
    marker = request.node.get_closest_marker("criterion")
    label = marker.args[0] if marker else request.node.name
    return Verdict(label)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
