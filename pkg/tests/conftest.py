from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


class StubRng:
    """Stands in for numpy's Generator with forced outcomes.

    ``ints`` is "min" or "max" (or a callable ``(low, high) -> values``);
    ``normal`` is a constant returned for every normal draw, or None to
    return the requested mean.
    """

    def __init__(self, ints="min", normal=None):
        self.ints = ints
        self.normal_value = normal

    def integers(self, low, high):
        low = np.asarray(low)
        high = np.asarray(high)
        if callable(self.ints):
            return self.ints(low, high)
        return low if self.ints == "min" else high - 1

    def normal(self, loc=0.0, scale=1.0, size=None):
        value = loc if self.normal_value is None else self.normal_value
        return np.full(size, value, dtype=np.float64)


@pytest.fixture
def stub_rng():
    return StubRng


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    n, title = marker.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    item.config._acceptance.append((n, title, item.name, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    by_criterion = {}
    for n, title, name, outcome, detail in results:
        by_criterion.setdefault((n, title), []).append((name, outcome, detail))
    for (n, title), tests in sorted(by_criterion.items()):
        ok = all(outcome == "passed" for _, outcome, _ in tests)
        failed = [name for name, outcome, _ in tests if outcome != "passed"]
        details = "; ".join(d for _, _, d in tests if d)
        note = f" [failed: {', '.join(failed)}]" if failed else ""
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2} {title}: {details}{note}")
