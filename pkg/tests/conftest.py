from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ifnet import FilteredGraph, WeightMatrix  # noqa: E402
from ifnet.core import COVARIANCE, GENERIC_SIMILARITY  # noqa: E402

# the chordal example graph used throughout the tests, 0-based
# (1-based edges 12 23 35 24 26 25 46 56 45)
SIX_EDGES = [(0, 1), (1, 2), (2, 4), (1, 3), (1, 5), (1, 4), (3, 5), (4, 5), (3, 4)]
SIX_CLIQUES = {(0, 1), (1, 2, 4), (1, 3, 4, 5)}
SIX_SEPARATORS = {(1,), (1, 4)}


def random_weights(rng, p: int) -> WeightMatrix:
    """Distinct positive weights in (0, 1)."""
    w = np.zeros((p, p))
    iu = np.triu_indices(p, 1)
    w[iu] = rng.permutation(len(iu[0]))[:] + rng.uniform(0.05, 0.95, len(iu[0]))
    w[iu] /= w[iu].max() + 1.0
    w = w + w.T
    np.fill_diagonal(w, 1.0)
    return WeightMatrix(w, GENERIC_SIMILARITY)


def random_spd(rng, p: int, scale_spread: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((p, 2 * p))
    s = a @ a.T / (2 * p) + 0.1 * np.eye(p)
    d = np.exp(rng.uniform(-scale_spread, scale_spread, p) / 2)
    return s * np.outer(d, d)


def random_cov(rng, p: int) -> WeightMatrix:
    return WeightMatrix(random_spd(rng, p), COVARIANCE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def six_graph():
    return FilteredGraph(6, SIX_EDGES)


# ---------------------------------------------------------------------------
# one summary line per acceptance criterion
# ---------------------------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    _ACCEPTANCE[num] = ("PASS" if report.passed else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        status, name = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  ({name})")
