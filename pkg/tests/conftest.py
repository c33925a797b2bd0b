import sys
from pathlib import Path

import pytest

from gae2e import default_e2e_space

STUBS = Path(__file__).parent / "stubs"

_acceptance: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(criterion, title): exit criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _acceptance.append((marker.args[0], marker.args[1], status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit, title, status in sorted(_acceptance, key=lambda r: (int(r[0].split(".")[0]), r[0])):
        terminalreporter.write_line(f"[{status}] criterion {crit}: {title}")


@pytest.fixture
def e2e_space():
    return default_e2e_space()


def stub_command(name: str, *args: str) -> str:
    parts = [sys.executable, str(STUBS / name), *args]
    return " ".join(f"'{p}'" for p in parts)
