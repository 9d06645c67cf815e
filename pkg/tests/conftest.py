import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE = {}


def record(criterion, ok, seconds, note=""):
    prev = ACCEPTANCE.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        seconds += prev[1]
        note = "; ".join(x for x in (prev[2], note) if x)
    ACCEPTANCE[criterion] = (ok, seconds, note)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, secs, note = ACCEPTANCE[k]
        line = "criterion %d: %s (%.2fs)" % (k, "PASS" if ok else "FAIL", secs)
        if note:
            line += " - " + note
        terminalreporter.write_line(line)
