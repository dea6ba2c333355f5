"""Best-fit subspaces for point clouds in the tropical projective torus.

The fitting objective throughout is the sum of tropical distances between the
sample points and their projections onto the candidate object:

  * a single point (Fermat-Weber median, solved exactly as a linear program),
  * a tropical hyperplane (grid search plus coordinate descent on the normal),
  * a rank-m tropical linear space (seeded multi-restart local search over
    real m x d generator matrices; heuristic, global optimality not claimed).

The one-dimensional space through two points in general position is available
in closed form and is unique; :func:`two_point_stiefel` builds it directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from .core import TropPoint, canonicalize, canonicalize_rows, trop_distance_rows
from .errors import EmptyGrid, LimitExceeded, NotGeneralPosition, RankExceedsDim, UnsupportedDim
from .linalg import PluckerVector, TropMatrix
from .parallel import parallel_map
from .spaces import (
    HyperplaneNormal,
    StiefelSpace,
    blue_rule_project_batch,
    hyperplane_distance_batch,
    hyperplane_space,
)
from .subsets import subsets_colex

_MAX_GRID_NODES = 2_000_000


class Sample:
    """A point cloud: n canonical rows of common dimension d (n >= 1, d >= 2)."""

    __slots__ = ("_coords",)

    def __init__(self, coords: np.ndarray):
        arr = np.asarray(coords, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(f"need an (n, d) array with n >= 1, got shape {arr.shape}")
        if np.any(arr[:, 0] != 0.0):
            raise ValueError("sample rows must be canonical; use Sample.from_rows")
        arr = canonicalize_rows(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "_coords", arr)

    @classmethod
    def from_rows(cls, rows: Union[np.ndarray, Sequence[Sequence[float]]]) -> "Sample":
        return cls(canonicalize_rows(np.asarray(rows, dtype=float)))

    @classmethod
    def from_points(cls, points: Iterable[TropPoint]) -> "Sample":
        return cls(np.stack([p.coords for p in points]))

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def n(self) -> int:
        return self._coords.shape[0]

    @property
    def d(self) -> int:
        return self._coords.shape[1]

    def __len__(self) -> int:
        return self.n

    def point(self, i: int) -> TropPoint:
        return TropPoint(self._coords[i])


@dataclass(frozen=True)
class GridSpec:
    """Axis range [lo, hi] swept with the given step, shared by all free axes."""

    lo: float = -10.0
    hi: float = 10.0
    step: float = 0.1

    def values(self) -> np.ndarray:
        if self.step <= 0 or not np.isfinite(self.step):
            raise EmptyGrid(f"step must be positive, got {self.step}")
        if self.hi < self.lo:
            raise EmptyGrid(f"empty range [{self.lo}, {self.hi}]")
        count = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(count)


@dataclass
class FitResult:
    """A fitted object with its objective and per-point projections.

    ``objective`` equals ``distances.sum()``; every row of ``projections`` is
    canonical and lies on the fitted object (membership within 1e-9).
    """

    space: object  # StiefelSpace | HyperplaneNormal | TropPoly2 | TropPoint
    objective: float
    projections: np.ndarray
    distances: np.ndarray
    iterations: int = 0
    restarts: int = 0
    trace: Optional[Tuple[float, ...]] = None


# ---- Fermat-Weber ------------------------------------------------------------------


def fermat_weber(sample: Sample) -> Tuple[TropPoint, float]:
    """An exact minimizer of sum_i d_tr(z, x_i) and its objective.

    The objective is convex piecewise-linear in the d-1 free coordinates of z,
    so the problem is the LP

        min sum_i t_i   s.t.   t_i >= (z_j - x^i_j) - (z_k - x^i_k)  for all i
                               and all ordered pairs j != k,

    solved with HiGHS.  The optimal set is generally a polytope; one optimal
    vertex is returned.
    """
    X = sample.coords
    n, d = X.shape
    if n == 1:
        return TropPoint(X[0]), 0.0

    n_z = d - 1
    pairs = [(j, k) for j in range(d) for k in range(d) if j != k]
    rows_per_point = len(pairs)
    A = np.zeros((n * rows_per_point, n_z + n))
    b = np.empty(n * rows_per_point)
    for i in range(n):
        for r, (j, k) in enumerate(pairs):
            row = i * rows_per_point + r
            if j > 0:
                A[row, j - 1] += 1.0
            if k > 0:
                A[row, k - 1] -= 1.0
            A[row, n_z + i] = -1.0
            b[row] = X[i, j] - X[i, k]
    c = np.concatenate([np.zeros(n_z), np.ones(n)])
    bounds = [(None, None)] * n_z + [(0, None)] * n
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"median LP failed: {res.message}")
    z = np.concatenate([[0.0], res.x[:n_z]])
    point = TropPoint(z)
    diffs = z[None, :] - X
    objective = float((diffs.max(axis=1) - diffs.min(axis=1)).sum())
    return point, objective


def fermat_weber_objective(z: Union[TropPoint, Sequence[float]], sample: Sample) -> float:
    """sum_i d_tr(z, x_i) for an arbitrary candidate z."""
    coords = z.coords if isinstance(z, TropPoint) else np.asarray(z, dtype=float)
    diffs = coords[None, :] - sample.coords
    return float((diffs.max(axis=1) - diffs.min(axis=1)).sum())


# ---- hyperplane fitting ------------------------------------------------------------


def _hyperplane_objective_batch(omegas: np.ndarray, X: np.ndarray) -> np.ndarray:
    return hyperplane_distance_batch(omegas, X).sum(axis=1)


def _grid_nodes(d: int, grid: GridSpec) -> np.ndarray:
    axis = grid.values()
    if axis.size == 0:
        raise EmptyGrid("grid has no nodes")
    n_nodes = axis.size ** (d - 1)
    if n_nodes > _MAX_GRID_NODES:
        raise LimitExceeded(
            f"grid would have {n_nodes} nodes (> {_MAX_GRID_NODES}); coarsen the step or range"
        )
    mesh = np.meshgrid(*([axis] * (d - 1)), indexing="ij")
    nodes = np.zeros((int(n_nodes), d))
    for j, g in enumerate(mesh):
        nodes[:, j + 1] = g.ravel()
    return nodes


def _coordinate_descent(omega0: np.ndarray, objective, step0: float, min_step: float = 1e-6,
                        max_sweeps: int = 10_000) -> Tuple[np.ndarray, float, int, List[float]]:
    """Greedy per-coordinate +-step search with multiplicative step halving."""
    omega = omega0.copy()
    best = objective(omega)
    trace = [best]
    step = step0
    sweeps = 0
    d = omega.shape[0]
    while step > min_step and sweeps < max_sweeps:
        improved = False
        for j in range(1, d):
            for s in (step, -step):
                cand = omega.copy()
                cand[j] += s
                val = objective(cand)
                if val < best:
                    omega, best = cand, val
                    trace.append(best)
                    improved = True
        sweeps += 1
        if not improved:
            step *= 0.5
    return omega, best, sweeps, trace


def fit_hyperplane(sample: Sample, grid: GridSpec = GridSpec(), refine: bool = True) -> FitResult:
    """Best-fit tropical hyperplane normal by grid search plus local refinement.

    Scans omega over the grid (first coordinate pinned to 0), then runs
    coordinate descent with step halving down to 1e-6 from the best node.
    Deterministic for a fixed grid.
    """
    X = sample.coords
    d = sample.d
    if d < 3:
        raise UnsupportedDim(f"hyperplane fitting needs d >= 3, got d={d}")
    nodes = _grid_nodes(d, grid)
    chunk = max(1, int(2e7 // max(1, X.shape[0] * d)))
    best_val = np.inf
    best_node = nodes[0]
    for start in range(0, nodes.shape[0], chunk):
        vals = _hyperplane_objective_batch(nodes[start : start + chunk], X)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_node = nodes[start + i]
    trace = [best_val]
    iterations = 0
    omega = best_node
    if refine:
        omega, best_val, iterations, more = _coordinate_descent(
            best_node, lambda w: float(_hyperplane_objective_batch(w[None, :], X)[0]), step0=grid.step
        )
        trace.extend(more[1:])
    normal = HyperplaneNormal(TropPoint(omega))
    proj = blue_rule_project_batch(hyperplane_space(normal), X)
    dists = trop_distance_rows(X, proj)
    return FitResult(
        space=normal,
        objective=float(dists.sum()),
        projections=proj,
        distances=dists,
        iterations=iterations,
        restarts=1,
        trace=tuple(trace),
    )


# ---- rank-m space fitting ----------------------------------------------------------


def _stiefel_objective(entries: np.ndarray, X: np.ndarray) -> float:
    space = StiefelSpace.from_matrix(entries)
    proj = blue_rule_project_batch(space, X)
    return float(trop_distance_rows(X, proj).sum())


def _descend_matrix(A0: np.ndarray, X: np.ndarray, step0: float = 1.0, min_step: float = 1e-4,
                    max_sweeps: int = 200) -> Tuple[np.ndarray, float, int, List[float]]:
    A = A0.copy()
    best = _stiefel_objective(A, X)
    trace = [best]
    step = step0
    sweeps = 0
    m, d = A.shape
    while step > min_step and sweeps < max_sweeps:
        improved = False
        for r in range(m):
            for c in range(d):
                for s in (step, -step):
                    cand = A.copy()
                    cand[r, c] += s
                    val = _stiefel_objective(cand, X)
                    if val < best - 1e-12:
                        A, best = cand, val
                        trace.append(best)
                        improved = True
        sweeps += 1
        if not improved:
            step *= 0.5
    return A, best, sweeps, trace


def fit_stiefel(sample: Sample, m: int, restarts: int = 5, seed: int = 0) -> FitResult:
    """Heuristic best-fit rank-m tropical linear space via seeded local search.

    Minimizes sum_i d_tr(x_i, proj(x_i)) over real m x d generator matrices by
    coordinate descent with step halving and deterministic random restarts.
    Restart 0 starts from the Fermat-Weber point replicated with a unit bump
    on one axis per row; restart 1 uses the first m sample points as rows;
    further restarts jitter random sample rows.  Returns the best local
    optimum found; global optimality is not claimed.
    """
    X = sample.coords
    n, d = X.shape
    if not 1 <= m < d:
        raise RankExceedsDim(f"need 1 <= m < d, got m={m}, d={d}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    fw, _ = fermat_weber(sample)

    def initial_matrix(r: int) -> np.ndarray:
        if r == 0:
            A = np.tile(fw.coords, (m, 1))
            A[np.arange(m), np.arange(m) % d] += 1.0
            return A
        if r == 1:
            rows = [X[i % n] for i in range(m)]
            A = np.stack(rows)
            if n < m:  # repeated rows carry no rank; separate them
                A += np.eye(m, d)
            return A
        rng = np.random.default_rng((seed, r))
        idx = rng.integers(0, n, size=m)
        return X[idx] + rng.normal(scale=0.5, size=(m, d))

    def run_restart(r: int):
        A0 = initial_matrix(r)
        return _descend_matrix(A0, X)

    results = parallel_map(run_restart, range(restarts))
    best_r = min(range(restarts), key=lambda r: (results[r][1], r))
    A, objective, _, trace = results[best_r]
    total_sweeps = sum(res[2] for res in results)

    space = StiefelSpace.from_matrix(A)
    proj = blue_rule_project_batch(space, X)
    dists = trop_distance_rows(X, proj)
    return FitResult(
        space=space,
        objective=float(dists.sum()),
        projections=proj,
        distances=dists,
        iterations=total_sweeps,
        restarts=restarts,
        trace=tuple(trace),
    )


# ---- exact two-point construction --------------------------------------------------


def two_point_stiefel(mu: Union[TropPoint, Sequence[float]], nu: Union[TropPoint, Sequence[float]],
                      tol: float = 1e-9) -> StiefelSpace:
    """The unique rank-2 space through two points in general position.

    General position means all coordinate differences mu_i - nu_i are
    pairwise distinct (within ``tol``); the subset coordinates are then
    P_{ik} = max(mu_i + nu_k, mu_k + nu_i), equivalently the maximal tropical
    minors of the 2 x d matrix with rows mu and nu.
    """
    a = (mu if isinstance(mu, TropPoint) else canonicalize(mu)).coords
    b = (nu if isinstance(nu, TropPoint) else canonicalize(nu)).coords
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a.shape[0]
    if d < 3:
        raise RankExceedsDim(f"rank-2 space needs d >= 3, got d={d}")
    diff = a - b
    subs = subsets_colex(d, 2)
    i, k = subs[:, 0], subs[:, 1]
    collisions = np.abs(diff[i] - diff[k]) <= tol
    if np.any(collisions):
        pairs = [(int(ii) + 1, int(kk) + 1) for ii, kk in subs[collisions]]
        raise NotGeneralPosition(pairs)
    values = np.maximum(a[i] + b[k], a[k] + b[i])
    return StiefelSpace(PluckerVector(d=d, m=2, values=values), validate=False)


# ---- contour grids -----------------------------------------------------------------


@dataclass(frozen=True)
class ContourGrid:
    """Objective values over a 2-d grid of canonical (0, a, b) nodes, d=3 only."""

    mode: str
    axis1: np.ndarray  # coordinate 2 values (rows)
    axis2: np.ndarray  # coordinate 3 values (columns)
    values: np.ndarray  # (len(axis1), len(axis2))
    min_index: Tuple[int, int]
    min_node: Tuple[float, float, float]
    min_value: float


def contour_grid(sample: Sample, mode: str, grid: GridSpec = GridSpec()) -> ContourGrid:
    """Objective landscape over normals (hyperplane mode) or medians (fermat_weber mode)."""
    if sample.d != 3:
        raise UnsupportedDim(f"contour grids need d = 3, got d={sample.d}")
    if mode not in ("hyperplane", "fermat_weber"):
        raise ValueError(f"unknown contour mode {mode!r}")
    axis = grid.values()
    if axis.size == 0:
        raise EmptyGrid("grid has no nodes")
    if axis.size * axis.size > _MAX_GRID_NODES:
        raise LimitExceeded("contour grid too fine; coarsen the step or range")
    aa, bb = np.meshgrid(axis, axis, indexing="ij")
    nodes = np.stack([np.zeros(aa.size), aa.ravel(), bb.ravel()], axis=1)
    X = sample.coords
    if mode == "hyperplane":
        vals = _hyperplane_objective_batch(nodes, X)
    else:
        diffs = nodes[:, None, :] - X[None, :, :]
        vals = (diffs.max(axis=2) - diffs.min(axis=2)).sum(axis=1)
    matrix = vals.reshape(axis.size, axis.size)
    flat = int(np.argmin(matrix))
    i, j = divmod(flat, axis.size)
    return ContourGrid(
        mode=mode,
        axis1=axis,
        axis2=axis.copy(),
        values=matrix,
        min_index=(i, j),
        min_node=(0.0, float(axis[i]), float(axis[j])),
        min_value=float(matrix[i, j]),
    )
