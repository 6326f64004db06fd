from __future__ import annotations

from contextlib import contextmanager

import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Context manager recording one pass/fail line per acceptance criterion."""
    results = request.config.stash[_RESULTS]

    @contextmanager
    def record(number: int, title: str):
        state = {"detail": ""}
        try:
            yield state
        except BaseException as exc:
            msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            line = f"criterion {number} FAIL  {title}: {msg}"
            results[number] = line
            print(line)
            raise
        line = f"criterion {number} PASS  {title}" + (f": {state['detail']}" if state["detail"] else "")
        results[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
