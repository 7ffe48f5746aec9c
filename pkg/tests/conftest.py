"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

from kerndep.ae import generate_synthetic_sequences

# Populated by tests/test_acceptance.py; printed at the end of the run so
# every criterion gets one visible pass/fail line even under capture.
_ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    """Recorder for acceptance criteria: record the line, then assert."""

    def check(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        _ACCEPTANCE_LINES[number] = f"criterion {number:2d} {name}: {status}{suffix}"
        assert ok, f"acceptance criterion {number} ({name}) failed{suffix}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(_ACCEPTANCE_LINES[number])


@pytest.fixture(scope="session")
def small_dataset():
    # 12 sequences x 10 frames of 8x8 pixels, 4 classes: big enough to
    # train on, small enough that every test stays fast.
    return generate_synthetic_sequences(
        num_sequences=12, frames_per_sequence=10, side=8, num_classes=4, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
