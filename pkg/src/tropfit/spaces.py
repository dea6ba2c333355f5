"""Tropical linear spaces from coordinate vectors: membership and exact projection.

A valid coordinate vector p on m-subsets of [d] cuts out the tropical linear
space L_p: the points x for which, for every (m+1)-subset tau, the maximum of
p(tau \\ {i}) + x_i over i in tau is attained at least twice.  A nearest point
of L_p under the tropical metric is computed coordinate-wise by

    w_i = max over (m-1)-subsets tau not containing i of
          min over j not in tau of  u_j + p(tau u {i}) - p(tau u {j}),

and the complementary residual vector v (one entry per coordinate, collecting
the unique-maximum gaps over all (m+1)-subsets) satisfies u = w + v.

The naive cost is O(C(d, m-1) * d) per coordinate, so construction rejects
m > 6 or d > 64 outright rather than letting callers wait forever.  Batch
entry points vectorize over points in fixed-size chunks; results do not
depend on the chunking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ._kernels import blue_batch_raw
from .core import NEG_INF, TropPoint, canonicalize, canonicalize_rows, trop_distance_rows
from .errors import DegeneratePlucker, DimMismatch, InvalidPlucker, LimitExceeded, RankExceedsDim
from .linalg import PluckerVector, TropMatrix, plucker_from_matrix, validate_plucker
from .subsets import colex_rank, subsets_colex

MAX_RANK = 6
MAX_DIM = 64

# skip construction-time exchange validation above this many checked terms
_VALIDATE_BUDGET = 2.0e7

_CHUNK_ELEMS = 1.6e7


@dataclass(frozen=True)
class HyperplaneNormal:
    """Normal vector omega of the tropical hyperplane H_omega, canonical form."""

    omega: TropPoint

    @property
    def d(self) -> int:
        return self.omega.d


def _top2(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Largest and second largest along the last axis."""
    part = np.partition(values, values.shape[-1] - 2, axis=-1)
    return part[..., -1], part[..., -2]


def hyperplane_distance(omega: Union[HyperplaneNormal, TropPoint, Sequence[float]], x: Union[TropPoint, Sequence[float]]) -> float:
    """Tropical distance from x to the hyperplane H_omega: max - 2nd max of omega + x."""
    w = omega.omega.coords if isinstance(omega, HyperplaneNormal) else np.asarray(
        omega.coords if isinstance(omega, TropPoint) else omega, dtype=float
    )
    v = x.coords if isinstance(x, TropPoint) else np.asarray(x, dtype=float)
    if w.shape != v.shape:
        raise DimMismatch(f"normal has d={w.shape}, point has d={v.shape}")
    terms = w + v
    hi, second = _top2(terms)
    return float(hi - second)


def hyperplane_distance_batch(omegas: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Distances from each point to each hyperplane: (G, n) for (G, d) x (n, d)."""
    terms = omegas[:, None, :] + points[None, :, :]
    hi, second = _top2(terms)
    return hi - second


@lru_cache(maxsize=None)
def _blue_table(d: int, m: int) -> np.ndarray:
    """(K1, d) ranks of tau u {j} over (m-1)-subsets tau; last slot marks j in tau."""
    tau1 = subsets_colex(d, m - 1)
    n_sub = subsets_colex(d, m).shape[0]
    union = np.empty((tau1.shape[0], d, m), dtype=np.int64)
    union[:, :, : m - 1] = tau1[:, None, :]
    union[:, :, m - 1] = np.arange(d, dtype=np.int64)[None, :]
    union.sort(axis=-1)
    dup = (np.diff(union, axis=-1) == 0).any(axis=-1)
    rank = colex_rank(union, d)
    rank[dup] = n_sub
    rank.flags.writeable = False
    return rank


@lru_cache(maxsize=None)
def _drop_table(d: int, m: int) -> np.ndarray:
    """(K3, m+1) ranks of tau \\ {tau_s} over (m+1)-subsets tau."""
    tau3 = subsets_colex(d, m + 1)
    width = m + 1
    keep = ~np.eye(width, dtype=bool)
    comp = np.stack([tau3[:, keep[s]] for s in range(width)], axis=1)
    rank = colex_rank(comp, d)
    rank.flags.writeable = False
    return rank


class StiefelSpace:
    """A tropical linear space held by its subset coordinate vector.

    Construction checks the three-term exchange condition whenever the
    exhaustive check is affordable (the cost grows like C(d,m-1) * C(d,m+1));
    vectors produced by :meth:`from_matrix` or the two-point constructor are
    valid by construction and skip the check.
    """

    def __init__(self, p: PluckerVector, validate: Optional[bool] = None, tol: float = 1e-9):
        if p.d > MAX_DIM or p.m > MAX_RANK:
            raise LimitExceeded(
                f"projection rules are guarded at d <= {MAX_DIM}, m <= {MAX_RANK}; got d={p.d}, m={p.m}"
            )
        if validate is None:
            cost = float(subsets_colex(p.d, p.m - 1).shape[0]) * subsets_colex(p.d, p.m + 1).shape[0] * (p.m + 1)
            validate = cost <= _VALIDATE_BUDGET
        if validate:
            violations = validate_plucker(p, tol=tol)
            if violations:
                worst = max(violations, key=lambda v: v.gap)
                raise InvalidPlucker(
                    f"{len(violations)} exchange violations, e.g. sigma={worst.sigma}, tau={worst.tau}, gap={worst.gap}"
                )
        self.p = p

    @classmethod
    def from_matrix(cls, A: Union[TropMatrix, np.ndarray, Sequence[Sequence[float]]]) -> "StiefelSpace":
        """Space generated by the rows of A (maximal tropical minors)."""
        mat = A if isinstance(A, TropMatrix) else TropMatrix(np.asarray(A, dtype=float))
        return cls(plucker_from_matrix(mat), validate=False)

    @property
    def d(self) -> int:
        return self.p.d

    @property
    def m(self) -> int:
        return self.p.m

    # ---- precomputed index tables -------------------------------------------------

    @cached_property
    def _p_ext(self) -> np.ndarray:
        return self.p.extended()

    @property
    def _blue_idx(self) -> np.ndarray:
        return _blue_table(self.d, self.m)

    @property
    def _tau3(self) -> np.ndarray:
        return subsets_colex(self.d, self.m + 1)

    @property
    def _drop_idx(self) -> np.ndarray:
        return _drop_table(self.d, self.m)

    # ---- operations ---------------------------------------------------------------

    def _check_dim(self, d: int) -> None:
        if d != self.d:
            raise DimMismatch(f"space has d={self.d}, point has d={d}")


def membership_residual(space: StiefelSpace, x: Union[TropPoint, Sequence[float]]) -> float:
    """How far x is from satisfying every defining tie of the space.

    For each (m+1)-subset tau the terms p(tau \\ {i}) + x_i must attain their
    maximum at least twice; the residual is the worst max-minus-second-max gap
    over all tau (+inf when some tau has exactly one finite term).  Zero
    exactly on the space.
    """
    coords = x.coords if isinstance(x, TropPoint) else np.asarray(x, dtype=float)
    space._check_dim(coords.shape[0])
    terms = space._p_ext[space._drop_idx] + coords[space._tau3]
    finite = np.isfinite(terms)
    n_finite = finite.sum(axis=1)
    hi, second = _top2(np.where(finite, terms, -np.inf))
    with np.errstate(invalid="ignore"):
        gap = hi - second
    gap = np.where(n_finite == 0, 0.0, np.where(n_finite == 1, np.inf, gap))
    return float(gap.max())


def blue_rule_project_batch(space: StiefelSpace, U: np.ndarray) -> np.ndarray:
    """Nearest-point projections of the rows of U onto the space, canonicalized."""
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise ValueError(f"need an (n, d) array, got shape {U.shape}")
    space._check_dim(U.shape[1])
    if not np.all(np.isfinite(U)):
        raise ValueError("points to project must be finite")
    P1 = space._p_ext[space._blue_idx]          # (K1, d)
    out = blue_batch_raw(U, P1)
    if np.any(out == -np.inf):
        raise DegeneratePlucker("every projection candidate is -inf for some coordinate")
    return canonicalize_rows(out)


def blue_rule_project(space: StiefelSpace, u: Union[TropPoint, Sequence[float]]) -> TropPoint:
    """Nearest point of the space to u under the tropical metric (one minimizer)."""
    coords = u.coords if isinstance(u, TropPoint) else np.asarray(u, dtype=float)
    w = blue_rule_project_batch(space, coords[None, :])[0]
    return TropPoint(w)


def red_rule_residual(space: StiefelSpace, u: Union[TropPoint, Sequence[float]]) -> np.ndarray:
    """Residual vector v with u = (projection of u) + v, up to the quotient.

    Scans every (m+1)-subset tau: when max_i p(tau \\ {i}) + u_i is attained
    by a single i, that coordinate's entry is raised to the max-minus-second
    gap.  Ties leave v untouched.
    """
    coords = u.coords if isinstance(u, TropPoint) else np.asarray(u, dtype=float)
    space._check_dim(coords.shape[0])
    terms = space._p_ext[space._drop_idx] + coords[space._tau3]   # (K3, m+1)
    hi, second = _top2(terms)
    arg = np.argmax(terms, axis=1)
    update = np.isfinite(second) & (hi > second)
    v = np.zeros(space.d)
    if np.any(update):
        np.maximum.at(v, space._tau3[update, arg[update]], (hi - second)[update])
    return v


def project_with_distances(space: StiefelSpace, U: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Projections and tropical distances for the rows of U."""
    rows = canonicalize_rows(np.asarray(U, dtype=float))
    proj = blue_rule_project_batch(space, rows)
    return proj, trop_distance_rows(rows, proj)


# ---- structured generator matrices and their closed-form projections --------------


def axis_aligned_matrix(mu: Sequence[float], d: int) -> TropMatrix:
    """m x d generator with mu on the left diagonal, 0 on the last d-m columns."""
    mu = np.asarray(mu, dtype=float)
    m = mu.shape[0]
    if not 1 <= m < d:
        raise RankExceedsDim(f"need 1 <= m < d, got m={m}, d={d}")
    entries = np.full((m, d), NEG_INF)
    entries[np.arange(m), np.arange(m)] = mu
    entries[:, m:] = 0.0
    return TropMatrix(entries)


def axis_aligned_space(mu: Sequence[float], d: int) -> StiefelSpace:
    """Space of :func:`axis_aligned_matrix`; its subset coordinates are sums of mu entries."""
    return StiefelSpace.from_matrix(axis_aligned_matrix(mu, d))


def hyperplane_matrix(omega: Union[HyperplaneNormal, TropPoint, Sequence[float]]) -> TropMatrix:
    """(d-1) x d generator whose space is exactly the hyperplane H_omega."""
    w = omega.omega.coords if isinstance(omega, HyperplaneNormal) else np.asarray(
        omega.coords if isinstance(omega, TropPoint) else omega, dtype=float
    )
    d = w.shape[0]
    entries = np.full((d - 1, d), NEG_INF)
    entries[np.arange(d - 1), np.arange(d - 1)] = -w[: d - 1]
    entries[:, d - 1] = -w[d - 1]
    return TropMatrix(entries)


def hyperplane_space(omega: Union[HyperplaneNormal, TropPoint, Sequence[float]]) -> StiefelSpace:
    return StiefelSpace.from_matrix(hyperplane_matrix(omega))


def kth_smallest(values: np.ndarray, k: int) -> np.ndarray:
    """k-th smallest along the last axis, counted with multiplicity (k=1 is the min)."""
    return np.partition(values, k - 1, axis=-1)[..., k - 1]


def axis_aligned_batch(mu: Sequence[float], eps: np.ndarray, correlated: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points, their projections onto the axis-aligned space, and the distances.

    ``eps`` is an (n, d) array of per-coordinate offsets.  In the plain case
    the point is (mu_1 + e_1, ..., mu_m + e_m, e_{m+1}, ..., e_d) and the
    projection clips every offset at e*, the m-th smallest of the offsets.  In
    the correlated case the first m coordinates all carry the shared offset
    s = e_1 + ... + e_m, and e* is the m-th smallest of the multiset
    {s, ..., s (m times), e_{m+1}, ..., e_d}.

    Returns raw (non-canonical) points and projections plus the tropical
    distances max(offsets) - e*.
    """
    mu = np.asarray(mu, dtype=float)
    eps = np.asarray(eps, dtype=float)
    m = mu.shape[0]
    n, d = eps.shape
    if not 1 <= m < d:
        raise RankExceedsDim(f"need 1 <= m < d, got m={m}, d={d}")
    if correlated:
        shared = eps[:, :m].sum(axis=1, keepdims=True)
        vals = np.concatenate([np.broadcast_to(shared, (n, m)), eps[:, m:]], axis=1)
    else:
        vals = eps
    eps_star = kth_smallest(vals, m)
    points = vals.copy()
    points[:, :m] += mu
    proj = np.minimum(vals, eps_star[:, None])
    proj[:, :m] += mu
    dist = vals.max(axis=1) - eps_star
    return points, proj, dist


def axis_aligned_projection_formula(mu: Sequence[float], eps: Sequence[float], m: Optional[int] = None) -> TropPoint:
    """Closed-form projection onto the axis-aligned space, canonicalized.

    Coordinate i of the raw output is mu_i (for i <= m) plus min(e*, e_i),
    where e* is the m-th smallest offset.  Agrees with the general projection
    rule applied to the axis-aligned generator.
    """
    mu = np.asarray(mu, dtype=float)
    if m is None:
        m = mu.shape[0]
    elif m != mu.shape[0]:
        raise ValueError(f"m={m} does not match len(mu)={mu.shape[0]}")
    eps = np.asarray(eps, dtype=float)
    _, proj, _ = axis_aligned_batch(mu, eps[None, :], correlated=False)
    return canonicalize(proj[0])
