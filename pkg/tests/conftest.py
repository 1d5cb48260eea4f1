import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> list of (part, ok, detail); filled by test_acceptance
CRITERIA = {}


def record(number, part, ok, detail=""):
    CRITERIA.setdefault(number, []).append((part, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(CRITERIA):
        parts = CRITERIA[number]
        ok = all(p[1] for p in parts)
        failed = [f"{p[0]} ({p[2]})" if p[2] else p[0] for p in parts if not p[1]]
        tail = "" if ok else " failing: " + "; ".join(failed)
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}"
                      f" [{len(parts)} parts]{tail}")
