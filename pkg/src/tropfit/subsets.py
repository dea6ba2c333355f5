"""Dense indexing of the m-subsets of {0, ..., d-1} in colexicographic order.

Subset values are 0-based internally; all user-facing I/O converts to the
1-based convention.  The colex rank of a sorted subset (s_1 < ... < s_m) is
sum_i C(s_i, i), the combinatorial number system, which lets us map index
arrays of subsets to dense positions without dictionaries.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def subsets_colex(d: int, m: int) -> np.ndarray:
    """All m-subsets of range(d) as a read-only (C(d,m), m) int array, colex order."""
    if not 0 <= m <= d:
        raise ValueError(f"need 0 <= m <= d, got m={m}, d={d}")
    subs = sorted(combinations(range(d), m), key=lambda t: t[::-1])
    arr = np.array(subs, dtype=np.int64).reshape(len(subs), m)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _binom_table(n_max: int, k_max: int) -> np.ndarray:
    table = np.zeros((n_max + 1, k_max + 1), dtype=np.int64)
    for n in range(n_max + 1):
        for k in range(min(n, k_max) + 1):
            table[n, k] = comb(n, k)
    table.flags.writeable = False
    return table


def colex_rank(rows: np.ndarray, d: int) -> np.ndarray:
    """Colex ranks of sorted subsets given as a (..., m) int array."""
    rows = np.asarray(rows, dtype=np.int64)
    m = rows.shape[-1]
    table = _binom_table(d, m)
    ks = np.arange(1, m + 1, dtype=np.int64)
    return table[rows, ks].sum(axis=-1)


def key_1based(subset) -> str:
    """JSON key for a 0-based subset: ascending 1-based indices joined by commas."""
    return ",".join(str(int(i) + 1) for i in sorted(subset))


def parse_key_1based(key: str, d: int, m: int) -> tuple:
    """Inverse of :func:`key_1based`; validates range and size."""
    parts = [int(tok) for tok in key.split(",")]
    if len(parts) != m or len(set(parts)) != m:
        raise ValueError(f"subset key {key!r} is not an m={m} subset")
    if any(not 1 <= i <= d for i in parts):
        raise ValueError(f"subset key {key!r} out of range 1..{d}")
    return tuple(sorted(i - 1 for i in parts))
