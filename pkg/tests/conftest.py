from pathlib import Path

import pytest

from sparql2xq.mapping import load_mappings
from sparql2xq.xmlstore import parse_xml

FIXTURES = Path(__file__).parent / "fixtures"
NS = "http://ns.gr/#"
PERSON = "http://rdf.gr/person1209"


def fixture_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def mapping():
    return load_mappings(fixture_text("students.json"))


@pytest.fixture
def doc():
    return parse_xml(fixture_text("students.xml"))


# -- acceptance summary ---------------------------------------------------------
# tests marked ``@pytest.mark.acceptance(n, "title")`` are aggregated into one
# PASS/FAIL line per criterion at the end of the run

_criteria = {}
_criterion_of = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker:
            number, title = marker.args
            _criterion_of[item.nodeid] = number
            _criteria.setdefault(number, [title, []])


def pytest_runtest_logreport(report):
    number = _criterion_of.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _criteria[number][1].append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, results = _criteria[number]
        ok = bool(results) and all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)
