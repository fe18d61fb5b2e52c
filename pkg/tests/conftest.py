import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {
    1: "DN principal symbol and kernel",
    2: "B o DN inverse relation (exact and grid)",
    3: "harmonic-extension Laplacian identity, 10 seeds",
    4: "trace of resolvent: multiplier case",
    5: "trace of modulated resolvent: decay slope",
    6: "Poisson conjugation of a = 1",
    7: "Poisson conjugation of the Laplacian",
    8: "quadrature engine",
    9: "degree guards in the CLI",
    10: "homogeneity of integrated and conjugated symbols",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        n = mark.args[0]
        ok = rep.passed and not rep.failed
        _results[n] = _results.get(n, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _results:
            continue
        tr.write_line(f"criterion {n:2d}: {'PASS' if _results[n] else 'FAIL'}  {CRITERIA[n]}")
