import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_OUTCOMES = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or report.failed:
        if _OUTCOMES.get(k) != "FAIL":
            _OUTCOMES[k] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    from test_acceptance import CRITERIA, DETAILS
    terminalreporter.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        detail = DETAILS.get(k)
        tail = f"  ({detail})" if detail and _OUTCOMES[k] == "PASS" else ""
        terminalreporter.write_line(f"{_OUTCOMES[k]}  criterion {k}: {CRITERIA[k]}{tail}")
