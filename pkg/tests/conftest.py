from __future__ import annotations

import numpy as np
import pytest

from crownvol.geometry import CrownConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_config(rng, n, P):
    """Random cusp positions with gaps not too small (keeps ratios O(1))."""
    while True:
        D = np.sort(rng.uniform(0.0, P, n - 1))
        gaps = np.diff(np.concatenate(([0.0], D, [P])))
        if gaps.min() > 1e-3 * P:
            return CrownConfig(n, P, D)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collects one summary line per acceptance criterion."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
