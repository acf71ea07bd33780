import os
import sys
from pathlib import Path

import numpy as np
import pytest

from synthratings.clustering import ClusterModel
from synthratings.data import build_interaction_set

DATA_ROOT = Path(os.environ.get("SYNTHRATINGS_DATA", "/root/data"))

# u0={i0,i1}, u1={i0,i1}, u2={i1,i2}, u3={i1,i2}
TOY_PAIRS = [
    ("u0", "i0"), ("u0", "i1"),
    ("u1", "i0"), ("u1", "i1"),
    ("u2", "i1"), ("u2", "i2"),
    ("u3", "i1"), ("u3", "i2"),
]


@pytest.fixture
def toy():
    return build_interaction_set(TOY_PAIRS)


@pytest.fixture
def toy_partition(toy):
    labels = np.array([0, 0, 1, 1])
    centroids = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    return ClusterModel(k=2, assignments=labels, centroids=centroids, inertia=0.0)


def random_dataset(rng, n_users, n_items, density=0.3):
    pairs = []
    for u in range(n_users):
        row = rng.random(n_items) < density
        if not row.any():
            row[rng.integers(n_items)] = True
        pairs += [(f"u{u}", f"i{i}") for i in np.flatnonzero(row)]
    return build_interaction_set(pairs)


@pytest.fixture(params=["numba", "numpy"])
def kernel_path(request, monkeypatch):
    """Run a test once per kernel implementation."""
    if request.param == "numpy":
        monkeypatch.setenv("SYNTHRATINGS_DISABLE_NUMBA", "1")
    else:
        monkeypatch.delenv("SYNTHRATINGS_DISABLE_NUMBA", raising=False)
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not any(mod.RESULTS.values()):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
