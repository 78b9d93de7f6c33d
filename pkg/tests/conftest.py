import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rspsim.protocol import ProtocolParams  # noqa: E402

DATA = Path(__file__).parent / "data"


def random_params(rng, signed=True):
    """Random real ProtocolParams, optionally with random signs."""
    ta, tg = rng.uniform(0, np.pi / 2, size=2)
    a, b, g, d = np.cos(ta), np.sin(ta), np.cos(tg), np.sin(tg)
    if signed:
        a, b, g, d = np.array([a, b, g, d]) * rng.choice([-1, 1], size=4)
    return ProtocolParams(a, b, g, d)


CORNERS = [ProtocolParams(a, b, g, d) for a, b in ((1, 0), (0, 1)) for g, d in ((1, 0), (0, 1))]


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
