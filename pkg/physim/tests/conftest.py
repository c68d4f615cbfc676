"""
Simulators and cost ledgers for physical matrix-multiplication machines.
"""
from pathlib import Path

import numpy as np
import pytest
from physim.matrices import BinaryMatrix


@pytest.fixture(scope="session")
def location() -> Path:
    """Return the folder containing test files."""
    return Path(__file__).parent / "data"


@pytest.fixture
def rng() -> np.random.Generator:
    """A freshly seeded generator, the same for every test."""
    return np.random.default_rng(20240501)


@pytest.fixture
def random_pairs(rng):
    """Generate random pairs of n x n 0/1 matrices."""

    def generate(n: int, count: int, p: float = 0.5):
        for _ in range(count):
            yield BinaryMatrix.random(n, rng, p), BinaryMatrix.random(n, rng, p)

    return generate


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    """Configured seeds must not depend on the environment of the test run."""
    monkeypatch.delenv("PHYSIM_SEED", raising=False)
