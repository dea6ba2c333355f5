"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from tropfit.core import NEG_INF
from tropfit.linalg import TropMatrix, plucker_from_matrix
from tropfit.spaces import StiefelSpace


def random_matrix(rng: np.random.Generator, m: int, d: int, inf_frac: float = 0.0) -> TropMatrix:
    """Random generator matrix, optionally with -inf entries (rows kept nonzero)."""
    entries = rng.uniform(-5.0, 5.0, size=(m, d))
    if inf_frac > 0:
        mask = rng.random((m, d)) < inf_frac
        keep = rng.integers(0, d, size=m)  # one guaranteed finite entry per row
        mask[np.arange(m), keep] = False
        entries = np.where(mask, NEG_INF, entries)
    return TropMatrix(entries)


def random_space(rng: np.random.Generator, m: int, d: int, inf_frac: float = 0.0) -> StiefelSpace:
    return StiefelSpace.from_matrix(random_matrix(rng, m, d, inf_frac))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def example_space() -> StiefelSpace:
    """The worked rank-2 example in the 4-torus (parameter c = 1)."""
    return StiefelSpace.from_matrix(np.array([[0.0, 5.0, -5.0, 1.0], [0.0, -5.0, 5.0, -1.0]]))
