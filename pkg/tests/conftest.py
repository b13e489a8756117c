import time
from contextlib import contextmanager

import os

import numpy as np
import pytest
from hypothesis import settings

# deterministic example generation by default; HYPOTHESIS_PROFILE=explore draws fresh examples
settings.register_profile("default", derandomize=True, deadline=None)
settings.register_profile("explore", derandomize=False, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from crnlap import networks

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion.

    Usage: ``with criterion("AC1", "description", budget_s) as notes: ...``;
    failures inside the block (including an exceeded time budget) are
    recorded as FAIL and re-raised.
    """
    lines = request.config.stash[_ACCEPTANCE]

    @contextmanager
    def run(tag, title, budget_s):
        notes = []
        start = time.perf_counter()
        try:
            yield notes
            elapsed = time.perf_counter() - start
            assert elapsed < budget_s, f"runtime {elapsed:.2f} s exceeds {budget_s} s"
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            lines.append(f"{tag} FAIL {title} ({elapsed:.2f} s): {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}")
            raise
        detail = "; ".join(notes)
        lines.append(f"{tag} PASS {title} ({elapsed:.2f} s < {budget_s} s){': ' + detail if detail else ''}")
        print(lines[-1])

    return run


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ex1():
    return networks.example1((1.0, 2.0, 3.0, 4.0))


@pytest.fixture
def ex2():
    return networks.example2()


@pytest.fixture
def fig_graph():
    return networks.figure_graph()
