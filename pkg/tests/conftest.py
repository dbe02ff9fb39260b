import sys
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from clarkmodel.measure import CircleMeasure

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    max_examples=20,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SESSION_START = time.perf_counter()
#: acceptance results, filled by test_acceptance.py and printed at the end
ACCEPTANCE = {}


def pytest_collection_modifyitems(config, items):
    # the wall-clock criterion must run after everything else
    last = [it for it in items if it.get_closest_marker("runs_last")]
    rest = [it for it in items if not it.get_closest_marker("runs_last")]
    items[:] = rest + last


def pytest_configure(config):
    config.addinivalue_line("markers", "runs_last: run after every other test")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@st.composite
def atomic_measures(draw, min_atoms=1, max_atoms=8):
    """Atomic probability measures with well separated atoms."""
    n = draw(st.integers(min_atoms, max_atoms))
    gaps = np.array(draw(st.lists(st.floats(0.4, 1.0), min_size=n, max_size=n)))
    start = draw(st.floats(0.0, 2 * np.pi))
    masses = np.array(draw(st.lists(st.floats(0.2, 1.0), min_size=n, max_size=n)))
    ang = np.mod(start + 2 * np.pi * np.cumsum(gaps) / gaps.sum(), 2 * np.pi)
    return CircleMeasure(ang, masses / masses.sum()).sorted()


@st.composite
def disc_points(draw, rmax=0.95):
    r = draw(st.floats(0.0, rmax))
    t = draw(st.floats(0.0, 2 * np.pi))
    return complex(r * np.exp(1j * t))


@st.composite
def unimodular(draw):
    return complex(np.exp(1j * draw(st.floats(0.0, 2 * np.pi))))
