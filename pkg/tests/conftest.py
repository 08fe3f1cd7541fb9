import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ewlgame.game_core import GameMatrix2, StrategyDensity

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PD_MATRIX = GameMatrix2(2.0, 0.0, 4.0, 1.0)  # [[2,0],[4,1]] used throughout the examples

entries = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
matrices = st.builds(GameMatrix2, entries, entries, entries, entries)
weights = st.floats(0.0, 1.0, allow_nan=False)
interior_weights = st.floats(1e-3, 1.0 - 1e-3, allow_nan=False)
densities = weights.map(StrategyDensity.from_weight)
angles = st.floats(0.0, 2.0 * math.pi, allow_nan=False)
gammas = st.floats(0.0, math.pi / 2, allow_nan=False)


@st.composite
def pd_triples(draw, regime=None):
    """Ordered ``0 < a < b < c``; ``regime`` selects a+b<c ("low") or a+b>c ("high")."""
    a = draw(st.floats(0.1, 5.0))
    b = a + draw(st.floats(0.1, 5.0))
    if regime == "low":
        c = a + b + draw(st.floats(0.1, 5.0))
    elif regime == "high":
        c = b + draw(st.floats(0.05, 0.95)) * a
    else:
        c = b + draw(st.floats(0.1, 8.0))
    return a, b, c


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
