import re
from collections import defaultdict

import pytest

_criteria: dict[int, list[bool]] = defaultdict(list)
_CRIT = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[int(m.group(1))].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(_criteria[n])
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")


@pytest.fixture(scope="session")
def golden():
    from anosov_units.polyint import parse_poly
    from anosov_units.units import make_unit

    phi = make_unit(parse_poly("x^2-x-1"), 1.618)
    return {"phi": phi, "phi_bar": make_unit(parse_poly("x^2-x-1"), -0.618)}
