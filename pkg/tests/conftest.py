import itertools
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fixed_clock():
    return lambda: datetime(2024, 1, 1, tzinfo=timezone.utc)


@pytest.fixture
def tick_timer():
    """Deterministic stand-in for perf_counter: advances 1 ms per call."""
    counter = itertools.count()
    return lambda: next(counter) * 1e-3


@pytest.fixture(scope="session")
def trained_en_head():
    """(TrainResult, seconds) for a toy English head trained from scratch; shared by slow tests."""
    import time

    from scene2locale.seqnet import TOY_WORDS, TrainConfig, builtin_alphabet, train_head

    t0 = time.process_time()
    res = train_head(TOY_WORDS, builtin_alphabet("en"), TrainConfig())
    return res, time.process_time() - t0


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
