"""Max-plus scalars, points of the tropical projective torus, and the tropical metric.

Scalars live in the max-plus semiring (R u {-inf}, max, +): tropical addition
is ``max``, tropical multiplication is ordinary ``+`` with ``-inf`` absorbing.
We represent the bottom element with the IEEE ``-inf`` float; ``+inf`` and NaN
are rejected wherever values are constructed, so they never propagate.

Points of the torus R^d / R*1 are stored as canonical representatives with the
first coordinate pinned to 0 and all coordinates finite.  The tropical metric
between representatives is

    d_tr(v, w) = max_i (v_i - w_i) - min_i (v_i - w_i),

which is invariant under adding a constant to all coordinates of either point.
"""

from __future__ import annotations

import math
from typing import Iterable, Union

import numpy as np

from .errors import DimMismatch, DimTooSmall, NonFinite

NEG_INF = float("-inf")

ExtReal = float  # finite float or NEG_INF; +inf and NaN are excluded by construction


def is_bottom(a: float) -> bool:
    """True when ``a`` is the tropical additive identity -inf."""
    return a == NEG_INF


def as_extreal(a: Union[float, int]) -> float:
    """Validate a scalar as max-plus: finite or -inf.

    Raises NonFinite for NaN or +inf, the two floats that have no meaning in
    the semiring.
    """
    x = float(a)
    if math.isnan(x) or x == math.inf:
        raise NonFinite(f"not a max-plus scalar: {a!r}")
    return x


def trop_add(a: float, b: float) -> float:
    """Tropical addition: max(a, b)."""
    return a if a >= b else b


def trop_mul(a: float, b: float) -> float:
    """Tropical multiplication: a + b, with -inf absorbing."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


class TropPoint:
    """A point of the tropical projective torus in canonical form.

    The stored representative has ``coords[0] == 0.0`` exactly and every
    coordinate finite.  Instances are immutable; build them with
    :func:`canonicalize` unless the data is already canonical.
    """

    __slots__ = ("_coords",)

    def __init__(self, coords: Iterable[float]):
        arr = np.asarray(coords, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DimTooSmall(f"need a 1-d vector with d >= 2, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("torus points must have finite coordinates")
        if arr[0] != 0.0:
            raise ValueError("not canonical: first coordinate must be exactly 0")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "_coords", arr)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def d(self) -> int:
        return self._coords.shape[0]

    def __setattr__(self, name, value):
        raise AttributeError("TropPoint is immutable")

    def __len__(self) -> int:
        return self.d

    def __iter__(self):
        return iter(self._coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropPoint):
            return NotImplemented
        return self.d == other.d and bool(np.all(self._coords == other._coords))

    def __hash__(self) -> int:
        return hash(self._coords.tobytes())

    def __repr__(self) -> str:
        inner = ", ".join(format(x, "g") for x in self._coords)
        return f"TropPoint(({inner}))"


def canonicalize(raw: Iterable[float]) -> TropPoint:
    """Quotient a finite vector by R*1: subtract the first coordinate.

    Idempotent, and the unique representative with first coordinate 0.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise DimTooSmall(f"need a 1-d vector with d >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("cannot canonicalize a vector with non-finite entries")
    return TropPoint(arr - arr[0])


def canonicalize_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise canonical representatives of an (n, d) array."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise DimTooSmall(f"need an (n, d) array with d >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("cannot canonicalize rows with non-finite entries")
    return arr - arr[:, :1]


def _as_coords(p: Union[TropPoint, Iterable[float]]) -> np.ndarray:
    if isinstance(p, TropPoint):
        return p.coords
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFinite("tropical distance needs finite coordinates")
    return arr


def trop_distance(v: Union[TropPoint, Iterable[float]], w: Union[TropPoint, Iterable[float]]) -> float:
    """Tropical metric max_i(v_i - w_i) - min_i(v_i - w_i).

    Accepts canonical points or any finite representatives; the value does not
    depend on the representative.  Zero exactly when v and w agree in the
    quotient.
    """
    a = _as_coords(v)
    b = _as_coords(w)
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(diff.max() - diff.min())


def trop_distance_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise tropical distances between two (n, d) arrays."""
    diff = np.asarray(A, dtype=float) - np.asarray(B, dtype=float)
    return diff.max(axis=-1) - diff.min(axis=-1)
