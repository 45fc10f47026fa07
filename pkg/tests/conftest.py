import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("default")

# criterion id -> list of (part, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(criterion: int, part: str, passed: bool, detail: str):
        ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        ok = all(p for _, p, _ in parts if not _.startswith("info"))
        tr.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}")
        for part, passed, detail in parts:
            tag = "info" if part.startswith("info") else ("pass" if passed else "FAIL")
            tr.write_line(f"    [{tag}] {part}: {detail}")
