from __future__ import annotations

import pytest

from dressed_stirap import experiments as ex

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one pass/fail line for the acceptance summary, then assert."""

    def record(label: str, ok: bool, detail: str) -> None:
        _VERDICTS.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in _VERDICTS:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def closed_runs():
    """Closed-system full-model runs at the design point, computed once."""
    cache = {}

    def get(kind="transfer", scheme="dressed", **changes):
        key = (kind, scheme, tuple(sorted(changes.items())))
        if key not in cache:
            s = ex.Scenario(kind=kind, scheme=scheme, **changes)
            cache[key] = ex.run_scenario(s, keep_states=True)
        return cache[key]

    return get
