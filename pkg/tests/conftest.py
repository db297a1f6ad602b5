import numpy as np
import pytest

# criterion number -> list of (ok, detail); printed after the run
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(number, ok, detail):
        ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entries = ACCEPTANCE[number]
        ok = all(e[0] for e in entries)
        failed = [d for good, d in entries if not good]
        detail = "; ".join(failed) if failed else entries[-1][1]
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  ({len(entries)} checks) {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
