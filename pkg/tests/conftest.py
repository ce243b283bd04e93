from __future__ import annotations

import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

_REPORT: list[tuple[int, bool, str]] = []


@pytest.fixture(scope="session")
def reference_forms() -> dict:
    return json.loads((DATA / "reference_forms.json").read_text())


@pytest.fixture(scope="session")
def report():
    """Record one pass/fail line per acceptance criterion."""

    def add(num: int, ok: bool, msg: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {msg}"
        print(line)
        _REPORT.append((num, ok, line))

    return add


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_REPORT, key=lambda r: r[0]):
        terminalreporter.write_line(line)
