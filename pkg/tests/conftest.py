import time
from pathlib import Path

import pytest
from hypothesis import settings

from srocr import bench

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def hermetic_run():
    """Bundled corpus x default dpi/scale matrix, bicubic model, mock engine.

    Shared by the acceptance and bench tests; returns (records, seconds).
    """
    cfg = bench.BenchConfig(texts=bench.bundled_corpus(), cache=False)
    start = time.perf_counter()
    records = bench.run_matrix(cfg)
    return records, time.perf_counter() - start


VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Print and remember one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        VERDICTS.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance")
        for line in VERDICTS:
            terminalreporter.write_line(line)
