import re
import time
from dataclasses import dataclass

import pytest

from htensor.cp import RankEvidence, rank_estimate
from htensor.symmetry import standard_sas

Q3_SEED = 7
Q3_RESTARTS = 100


@dataclass
class TimedEvidence:
    evidence: RankEvidence
    seconds: float


@pytest.fixture(scope="session")
def q3_evidence() -> TimedEvidence:
    """The seeded Q3 rank table, computed once per session (about 20 s)."""
    start = time.perf_counter()
    ev = rank_estimate(standard_sas(3), 6, restarts=Q3_RESTARTS, seed=Q3_SEED, fit_tol=1e-6)
    return TimedEvidence(ev, time.perf_counter() - start)


_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    number, name = int(match.group(1)), match.group(2).replace("_", " ")
    if report.when == "call" or report.outcome != "passed":
        previous = _outcomes.get(number, ("PASS", name))[0]
        status = "PASS" if report.outcome == "passed" and previous == "PASS" else "FAIL"
        _outcomes[number] = (status, name)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status, name = _outcomes[number]
        terminalreporter.write_line(f"ACCEPTANCE [{status}] {number:2d} {name}")
    passed = sum(1 for s, _ in _outcomes.values() if s == "PASS")
    terminalreporter.write_line(f"ACCEPTANCE {passed}/{len(_outcomes)} criteria pass")
