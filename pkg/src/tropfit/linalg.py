"""Tropical matrices, tropical determinants, and exchange-valid coordinate vectors.

The tropical determinant of a square max-plus matrix is the maximum over
permutations of the diagonal sum, i.e. the optimal value of an assignment
problem.  We solve it with the O(q^3) Hungarian-style solver from scipy
(``linear_sum_assignment``), treating ``-inf`` entries as forbidden cells;
brute-force permutation enumeration stays in the test suite as an oracle.

An m-row tropical matrix A over d columns induces a coordinate vector
p(omega) = tdet(A_omega) on m-subsets omega of the columns.  Such vectors
satisfy the three-term exchange condition: for every (m-1)-subset sigma and
(m+1)-subset tau, the maximum of p(sigma u {t}) + p(tau \\ {t}) over t in tau
is attained at least twice.  :func:`validate_plucker` checks this exhaustively,
which costs O(C(d,m-1) * C(d,m+1) * m) and is meant for desk scale
(d <= 20, m <= 4 or so).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import NEG_INF
from .errors import NotSquare, RankExceedsDim
from .subsets import colex_rank, key_1based, subsets_colex


def _validate_entries(arr: np.ndarray, what: str) -> None:
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise ValueError(f"{what} entries must be finite or -inf")


@dataclass(frozen=True)
class TropMatrix:
    """An m x d max-plus matrix; rows generate a tropical linear space.

    Every row must contain at least one finite entry, otherwise the row is
    tropically zero and generates nothing.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"need a 2-d array, got shape {arr.shape}")
        m, d = arr.shape
        if m < 1 or d < 2:
            raise ValueError(f"need m >= 1 and d >= 2, got {m} x {d}")
        _validate_entries(arr, "matrix")
        if np.any(np.all(arr == NEG_INF, axis=1)):
            raise ValueError("every row needs at least one finite entry")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def d(self) -> int:
        return self.entries.shape[1]


def tdet(square: Union[TropMatrix, np.ndarray, Iterable[Iterable[float]]]) -> float:
    """Tropical determinant: max over permutations of the diagonal sum.

    Returns -inf iff no permutation avoids every -inf cell.
    """
    arr = square.entries if isinstance(square, TropMatrix) else np.asarray(square, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquare(f"tropical determinant needs a square matrix, got shape {arr.shape}")
    _validate_entries(arr, "matrix")
    try:
        rows, cols = linear_sum_assignment(arr, maximize=True)
    except ValueError:
        return NEG_INF
    return float(arr[rows, cols].sum())


@dataclass(frozen=True)
class PluckerVector:
    """Values on all m-subsets of [d], stored densely in colex order.

    ``values[i]`` belongs to ``subsets_colex(d, m)[i]``.  At least one value
    must be finite.  Construction does not enforce the exchange condition;
    use :func:`validate_plucker` (or build through a space type) for that.
    """

    d: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        if not 1 <= self.m < self.d:
            raise RankExceedsDim(f"need 1 <= m < d, got m={self.m}, d={self.d}")
        arr = np.asarray(self.values, dtype=float)
        expected = subsets_colex(self.d, self.m).shape[0]
        if arr.shape != (expected,):
            raise ValueError(f"need {expected} coordinates for d={self.d}, m={self.m}, got shape {arr.shape}")
        _validate_entries(arr, "coordinate")
        if not np.any(np.isfinite(arr)):
            raise ValueError("at least one coordinate must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def subsets(self) -> np.ndarray:
        return subsets_colex(self.d, self.m)

    def extended(self) -> np.ndarray:
        """Values with a trailing -inf slot, for index tables that mark invalid subsets."""
        return np.append(self.values, NEG_INF)

    def value(self, subset: Iterable[int]) -> float:
        """Coordinate of a 1-based m-subset."""
        zero_based = sorted(int(i) - 1 for i in subset)
        if len(zero_based) != self.m or len(set(zero_based)) != self.m:
            raise ValueError(f"{tuple(subset)} is not an m={self.m} subset")
        if zero_based[0] < 0 or zero_based[-1] >= self.d:
            raise ValueError(f"{tuple(subset)} out of range 1..{self.d}")
        rank = int(colex_rank(np.array(zero_based), self.d))
        return float(self.values[rank])

    def items(self) -> List[Tuple[Tuple[int, ...], float]]:
        """(1-based subset, value) pairs in ascending subset order."""
        pairs = [
            (tuple(int(i) + 1 for i in row), float(v))
            for row, v in zip(self.subsets, self.values)
        ]
        pairs.sort(key=lambda kv: kv[0])
        return pairs

    def to_json_dict(self) -> Dict:
        coords = {}
        for subset, v in self.items():
            key = ",".join(str(i) for i in subset)
            coords[key] = "-inf" if v == NEG_INF else v
        return {"d": self.d, "m": self.m, "coords": coords}


def plucker_from_matrix(A: Union[TropMatrix, np.ndarray]) -> PluckerVector:
    """Tropical maximal minors of A on all m-subsets of columns.

    The output always satisfies the exchange condition (minors of a matrix
    form a valuated matroid).
    """
    mat = A if isinstance(A, TropMatrix) else TropMatrix(np.asarray(A, dtype=float))
    m, d = mat.m, mat.d
    if m >= d:
        raise RankExceedsDim(f"need m < d, got m={m}, d={d}")
    subs = subsets_colex(d, m)
    if m == 1:
        vals = mat.entries[0, subs[:, 0]].astype(float)
    elif m == 2:
        a, b = subs[:, 0], subs[:, 1]
        e = mat.entries
        vals = np.maximum(e[0, a] + e[1, b], e[0, b] + e[1, a])
    else:
        vals = np.empty(subs.shape[0], dtype=float)
        for i, omega in enumerate(subs):
            vals[i] = tdet(mat.entries[:, omega])
    return PluckerVector(d=d, m=m, values=vals)


@dataclass(frozen=True)
class ExchangeViolation:
    """One failed three-term exchange check, reported with 1-based subsets."""

    sigma: Tuple[int, ...]
    tau: Tuple[int, ...]
    gap: float


def validate_plucker(p: PluckerVector, tol: float = 1e-9) -> List[ExchangeViolation]:
    """All (sigma, tau) pairs whose exchange maximum is not attained twice.

    For each pair the m+1 terms are p(sigma u {t}) + p(tau \\ {t}) for t in
    tau (terms with t in sigma are -inf).  Among the finite terms the maximum
    must tie within ``tol``; a single finite term is a violation (gap +inf),
    while all--inf terms are vacuous.  Empty result means valid.
    """
    d, m = p.d, p.m
    sigmas = subsets_colex(d, m - 1)
    taus = subsets_colex(d, m + 1)
    p_ext = p.extended()
    n_sub = p.values.shape[0]
    K1 = sigmas.shape[0]
    width = m + 1

    keep = ~np.eye(width, dtype=bool)
    out: List[ExchangeViolation] = []
    chunk = max(1, int(2e7 // max(1, K1 * width * m)))
    for start in range(0, taus.shape[0], chunk):
        tch = taus[start : start + chunk]

        # union ranks sigma u {t}; slot n_sub (-inf) when t in sigma
        B = tch.shape[0]
        union = np.empty((B, K1, width, m), dtype=np.int64)
        union[:, :, :, : m - 1] = sigmas[None, :, None, :]
        union[:, :, :, m - 1] = tch[:, None, :]
        union.sort(axis=-1)                                    # (B, K1, m+1, m)
        dup = (np.diff(union, axis=-1) == 0).any(axis=-1)
        union_rank = colex_rank(union, d)
        union_rank[dup] = n_sub

        # complement ranks tau \ {t}
        comp = np.stack([tch[:, keep[s]] for s in range(width)], axis=1)  # (B, m+1, m)
        comp_rank = colex_rank(comp, d)

        terms = p_ext[union_rank] + p_ext[comp_rank][:, None, :]          # (B, K1, m+1)
        finite = np.isfinite(terms)
        n_finite = finite.sum(axis=-1)
        top = np.sort(np.where(finite, terms, -np.inf), axis=-1)
        with np.errstate(invalid="ignore"):
            gap = top[..., -1] - top[..., -2]

        bad = (n_finite == 1) | ((n_finite >= 2) & (gap > tol))
        for b, k1 in zip(*np.nonzero(bad)):
            g = float("inf") if n_finite[b, k1] == 1 else float(gap[b, k1])
            out.append(
                ExchangeViolation(
                    sigma=tuple(int(i) + 1 for i in sigmas[k1]),
                    tau=tuple(int(i) + 1 for i in tch[b]),
                    gap=g,
                )
            )
    return out
