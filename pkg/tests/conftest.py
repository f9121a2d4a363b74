import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def worked():
    from ucml.models import load_model
    return load_model(CORPUS / "worked_example.ucml")


def closure(carrier, generators):
    """All sets reachable from the generators by complement and union (brute force)."""
    full = frozenset(carrier)
    sets = {frozenset(), full} | {frozenset(g) for g in generators}
    while True:
        new = {full - s for s in sets} | {a | b for a in sets for b in sets}
        if new <= sets:
            return sets
        sets |= new


# acceptance criteria: one PASS/FAIL line per criterion in the terminal summary

CRITERIA = {
    1: "worked example golden values",
    2: "envelope characterization",
    3: "cover search agrees with the LP",
    4: "envelope properties",
    5: "hierarchy of measure classes",
    6: "soundness harness and mutation test",
    7: "morphism preservation",
    8: "round trips on the corpus",
}
_criterion_of = {}
_criterion_ok = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _criterion_of[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    ok = _criterion_ok.setdefault(n, True)
    if report.failed or (report.when == "call" and report.skipped):
        _criterion_ok[n] = False
    elif ok and report.when == "call":
        _criterion_ok[n] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criterion_ok:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criterion_ok):
        verdict = "PASS" if _criterion_ok[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n} ({CRITERIA[n]}): {verdict}")
