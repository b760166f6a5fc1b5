from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

# Acceptance-criterion results collected while tests run, printed as a
# one-line-per-criterion table at the end of the session.
_criterion_results: list[tuple[str, bool, str]] = []


@pytest.fixture
def fixture_path() -> Path:
    return DATA_DIR / "campaign_fixture.csv"


@pytest.fixture
def truth_path() -> Path:
    return DATA_DIR / "campaign_fixture_truth.json"


@pytest.fixture
def golden_dir() -> Path:
    return DATA_DIR / "golden"


@pytest.fixture
def criterion():
    """Record (name, passed, detail) lines for the acceptance summary."""

    def _record(name: str, passed: bool, detail: str = "") -> None:
        _criterion_results.append((name, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, passed, detail in _criterion_results:
        mark = "PASS" if passed else "FAIL"
        line = f"[{mark}] {name}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line, green=passed, red=not passed)
