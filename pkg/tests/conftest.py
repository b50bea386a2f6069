from pathlib import Path

import numpy as np
import pytest

from mpssnet.datasets import ParallelDataset, SharedInputDataset

DATA = Path(__file__).resolve().parent.parent / "data"

# the illustrative five-DMU network: one input and one output per subsystem
TABLE1 = {
    "X1": [2, 3, 5, 4, 2],
    "Y1": [2, 5, 2, 4, 1],
    "X2": [2, 1, 1.5, 2, 4],
    "Y2": [3, 4, 6, 3, 2],
}
TABLE1_DMUS = ("A", "B", "C", "D", "E")


@pytest.fixture
def table1():
    return ParallelDataset(
        (TABLE1["X1"], TABLE1["X2"]),
        (TABLE1["Y1"], TABLE1["Y2"]),
        TABLE1_DMUS,
        ("I", "II"),
    )


@pytest.fixture
def data_dir():
    return DATA


def random_parallel(rng, n=None, h=None, m=None, s=None):
    n = n or int(rng.integers(1, 9))
    h = h or int(rng.integers(1, 4))
    m = m or int(rng.integers(1, 3))
    s = s or int(rng.integers(1, 3))
    X = tuple(rng.uniform(0.5, 10.0, (n, m)) for _ in range(h))
    Y = tuple(rng.uniform(0.5, 10.0, (n, s)) for _ in range(h))
    return ParallelDataset(X, Y)


def random_shared(rng, n=5, m=2, s=(1, 1), aggregation="concat"):
    X = rng.uniform(0.5, 10.0, (n, m))
    Y = tuple(rng.uniform(0.5, 10.0, (n, k)) for k in s)
    return SharedInputDataset(X, Y, aggregation=aggregation)


def corpus(seed=12345, size=200):
    """The fixed random corpus of small parallel networks used by several suites."""
    rng = np.random.default_rng(seed)
    return [random_parallel(rng) for _ in range(size)]
