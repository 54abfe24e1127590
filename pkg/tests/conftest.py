import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[str, str, float, float]] = {}


@contextmanager
def _criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
        status = "PASS"
    finally:
        _RESULTS[number] = (status, title, time.perf_counter() - start, limit)


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title, elapsed, limit = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {title}  ({elapsed:.2f} s, limit {limit:g} s)")
