import numpy as np
import pytest

from musum.audio_io import AudioClip
from musum import synthetic

SR = 22050

_acceptance = []


def tone(freq, duration_s, sr=SR, amp=1.0):
    t = np.arange(int(round(duration_s * sr))) / sr
    return AudioClip(amp * np.sin(2 * np.pi * freq * t), sr)


@pytest.fixture(scope="session")
def song60():
    """A 60 s string-like test clip."""
    return synthetic.string_like(60.0, np.random.default_rng(7))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance.append(("PASS" if rep.passed else "FAIL", doc))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for status, doc in _acceptance:
        terminalreporter.write_line(f"[{status}] {doc}")
