import pytest

CRITERION_RESULTS: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, ok: bool) -> bool:
        CRITERION_RESULTS[number] = (title, ok)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERION_RESULTS):
        title, ok = CRITERION_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
