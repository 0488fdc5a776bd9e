import time

import hypothesis
import numpy as np
import pytest

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.load_profile("ci")


@pytest.fixture
def stream():
    from cmopde.core import RandomStream

    return RandomStream(42)


# --- acceptance criterion reporting ----------------------------------------

class Criterion:
    """Wall-clock budget plus a one-line verdict for an acceptance criterion."""

    def __init__(self, label: str, limit_s: float):
        self.label = label
        self.limit_s = limit_s
        self.detail = ""
        self._start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._start

    def note(self, text: str) -> None:
        self.detail = text

    def check_runtime(self) -> None:
        assert self.elapsed < self.limit_s, (
            f"{self.label}: took {self.elapsed:.2f} s, budget {self.limit_s} s")


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    def make(label: str, limit_s: float) -> Criterion:
        c = Criterion(label, limit_s)
        request.node._criterion = c
        return c

    return make


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    c = getattr(item, "_criterion", None)
    if c is None or report.when != "call":
        return
    verdict = "PASS" if report.passed else "FAIL"
    line = f"{verdict}  {c.label}  ({c.elapsed:.2f} s / {c.limit_s:g} s)"
    if c.detail:
        line += f"  {c.detail}"
    item.config.stash.setdefault(_VERDICTS, []).append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
