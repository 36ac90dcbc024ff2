import os
import time
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

from polyurn import engine
from polyurn.model import build_model

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_SEED = 20240601

# criterion number -> list of (part, ok, detail)
_ACCEPTANCE = defaultdict(list)


@pytest.fixture
def criterion():
    """Record one acceptance sub-check; summarised at the end of the run."""

    def record(number, part, ok, detail):
        _ACCEPTANCE[number].append((part, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[number]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
        for part, pok, detail in parts:
            tr.write_line(f"    [{'pass' if pok else 'FAIL'}] {part}: {detail}")


@pytest.fixture(scope="session")
def large_w_run():
    """W samples for (4,1,1,4,1,1) at n = 10^5 with 10^5 replicates (shared, ~1 min)."""
    model = build_model(4, 1, 1, 4, 1, 1)
    t0 = time.perf_counter()
    w = engine.w_estimate(engine.SimConfig(model, 10**5, 10**5, ACCEPTANCE_SEED))
    return model, w, time.perf_counter() - t0
