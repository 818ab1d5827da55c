import sys
from pathlib import Path

import pytest

import modcheck.rewrite
from modcheck import kit
from modcheck.syntax import parse_file
from modcheck.checker import elaborate

sys.path.insert(0, str(Path(__file__).parent))
sys.setrecursionlimit(20000)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _check_matches(monkeypatch):
    monkeypatch.setattr(modcheck.rewrite, "CHECK_MATCHES", True)


@pytest.fixture(scope="session")
def theories():
    return {t.name: t.elaborate() for t in kit.bundle()}


def load_fixture(name, extra=""):
    path = FIXTURES / name
    return elaborate(parse_file(path.read_text() + extra, str(path)))


def elab(text, name="<test>"):
    return elaborate(parse_file(text, name))


# one PASS/FAIL line per acceptance criterion in the terminal summary
_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = "test_acceptance.py::test_criterion_"
    if marker in report.nodeid:
        key = report.nodeid.split(marker, 1)[1]
        num = int(key.split("_", 1)[0])
        ok = report.passed
        _criteria[num] = _criteria.get(num, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if _criteria[num] else 'FAIL'}")
