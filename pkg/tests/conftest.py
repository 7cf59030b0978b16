"""Shared fixtures and the acceptance-criteria summary hook.

test_acceptance.py wraps each criterion's assertions in the ``criterion``
context manager; the terminal summary then prints one PASS/FAIL line per
criterion regardless of which tests ran or failed.
"""

from __future__ import annotations

from contextlib import contextmanager

import pytest

from hypergrid import load_bundled_scenario, run_pipeline

_RESULTS: dict[str, str] = {}


@pytest.fixture
def criterion():
    @contextmanager
    def _criterion(label: str):
        try:
            yield
        except BaseException:
            _RESULTS[label] = "FAIL"
            raise
        _RESULTS[label] = "PASS"

    return _criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label in sorted(_RESULTS):
        terminalreporter.write_line(f"{label}: {_RESULTS[label]}")


@pytest.fixture(scope="session")
def figure1_report():
    return run_pipeline(load_bundled_scenario("figure1"))


@pytest.fixture(scope="session")
def figure3_report():
    return run_pipeline(load_bundled_scenario("figure3"))
