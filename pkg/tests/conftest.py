import time

import pytest
from hypothesis import settings, strategies as st

from radic.modulus import ModulusSequence

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SEQS = [
    ModulusSequence.constant(2),
    ModulusSequence.periodic(2, 3),
    ModulusSequence((4,), (3,)),
    ModulusSequence.constant(3),
    ModulusSequence((2, 5), (3, 2)),
]

seqs = st.sampled_from(SEQS)
small_seqs = st.builds(
    ModulusSequence,
    st.lists(st.integers(2, 7), max_size=3).map(tuple),
    st.lists(st.integers(2, 7), min_size=1, max_size=3).map(tuple),
)

_session_start = time.perf_counter()
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the test body decides pass/fail by asserting."""
    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    wall = time.perf_counter() - _session_start
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in range(1, 11):
        if number not in ACCEPTANCE:
            tr.write_line(f"criterion {number:2d}: FAIL  no verdict recorded (deselected or errored)")
            continue
        ok, detail = ACCEPTANCE[number]
        if number == 10:
            ok = ok and wall < 60
            detail += f"; session wall time {wall:.1f}s (< 60s)"
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
