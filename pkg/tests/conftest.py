"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""
import pytest

_RESULTS: dict = {}


class AcceptanceLog:
    def record(self, criterion: int, part: str, ok: bool, detail: str = "") -> bool:
        _RESULTS.setdefault(criterion, []).append((part, bool(ok), detail))
        return ok


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_RESULTS):
        parts = _RESULTS[c]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}")
        for part, pok, detail in parts:
            tr.write_line(f"    [{'ok' if pok else 'FAIL'}] {part}" + (f": {detail}" if detail else ""))
