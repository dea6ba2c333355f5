"""Gaussian-mixture sampling and Monte Carlo estimates of projection residuals.

Randomness comes from the counter-based Philox generator keyed by the user
seed, with standard normals produced by inverse-CDF transform of 53-bit
uniforms; runs are bit-reproducible for a fixed seed.  Estimators accumulate
in fixed-size chunks with a fixed reduction order (numpy's pairwise summation
within chunks, left-to-right across chunks), so results do not depend on the
execution environment.

Three estimator families are provided:

  * mean tropical distance of a k-variate standard Gaussian to the zero-normal
    hyperplane, i.e. E[max - 2nd max of k i.i.d. normals]; at k = 2 and 3 the
    exact values are 2/sqrt(pi) and 3/(2*sqrt(pi));
  * mean distance between a Gaussian draw and its projection onto structured
    axis-aligned or two-center rank-2 spaces, with the matching analytic upper
    bounds (2*sigma*sqrt(2 log d) and variants) reported alongside;
  * mean distance between a draw and the sample mean of its replication, with
    the sqrt((n-1)/n) shrinkage factor in the bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import ndtri

from .core import NEG_INF, canonicalize_rows
from .errors import BadParams, BadWeights, RankExceedsDim
from .fitting import Sample
from .linalg import TropMatrix
from .spaces import StiefelSpace, axis_aligned_batch, axis_aligned_matrix, blue_rule_project_batch, kth_smallest

_CHUNK_ROWS = 1 << 18  # fixed so that chunked reductions are reproducible


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by the seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)))


def standard_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via inverse CDF of (k + 1/2) / 2^53 uniforms."""
    k = rng.integers(0, 1 << 53, size=shape, dtype=np.uint64)
    u = (k.astype(float) + 0.5) * (2.0 ** -53)
    return ndtri(u)


@dataclass(frozen=True)
class Noise:
    """Per-component noise model: i.i.d. N(0, sigma^2) coordinates, or a
    block-correlated variant where the first m coordinates share the summed
    noise Z_1 + ... + Z_m."""

    kind: str
    sigma: float
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("iid", "block_correlated"):
            raise BadParams(f"unknown noise kind {self.kind!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise BadParams(f"sigma must be positive, got {self.sigma}")
        if self.kind == "block_correlated" and (self.m is None or self.m < 1):
            raise BadParams("block_correlated noise needs m >= 1")


@dataclass(frozen=True)
class MixtureComponent:
    mean: Tuple[float, ...]
    noise: Noise
    weight: float


@dataclass(frozen=True)
class MixtureSpec:
    """A finite Gaussian mixture over R^d plus the sampling seed."""

    components: Tuple[MixtureComponent, ...]
    seed: int = 0

    def __post_init__(self):
        if not self.components:
            raise BadWeights("mixture needs at least one component")
        d = len(self.components[0].mean)
        weights = [c.weight for c in self.components]
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise BadWeights(f"weights must be nonnegative and sum to 1, got {weights}")
        for c in self.components:
            if len(c.mean) != d:
                raise BadParams("all component means need the same dimension")
            if c.noise.kind == "block_correlated" and not 1 <= c.noise.m < d:
                raise BadParams(f"block size m={c.noise.m} must satisfy 1 <= m < d={d}")

    @property
    def d(self) -> int:
        return len(self.components[0].mean)


def sample_mixture(spec: MixtureSpec, n: int) -> Sample:
    """n i.i.d. draws, component chosen by weight, canonicalized rows."""
    if n < 1:
        raise BadParams("need n >= 1")
    d = spec.d
    rng = make_generator(spec.seed)
    u = rng.random(n)
    z = standard_normals(rng, (n, d))
    cum = np.cumsum([c.weight for c in spec.components])
    idx = np.searchsorted(cum, u, side="right").clip(max=len(spec.components) - 1)
    X = np.empty((n, d))
    for ci, comp in enumerate(spec.components):
        mask = idx == ci
        if not np.any(mask):
            continue
        zc = z[mask]
        sigma = comp.noise.sigma
        if comp.noise.kind == "iid":
            noise = sigma * zc
        else:
            m = comp.noise.m
            shared = zc[:, :m].sum(axis=1, keepdims=True)
            noise = sigma * np.concatenate([np.broadcast_to(shared, (zc.shape[0], m)), zc[:, m:]], axis=1)
        X[mask] = np.asarray(comp.mean, dtype=float)[None, :] + noise
    return Sample.from_rows(X)


@dataclass
class McReport:
    """A Monte Carlo estimate with its standard error and provenance."""

    estimate: float
    std_error: float
    n: int
    seed: int
    elapsed: float
    extras: Dict[str, object] = field(default_factory=dict)


def _report(dists_sum: float, dists_sumsq: float, n: int, seed: int, t0: float,
            extras: Optional[Dict[str, object]] = None) -> McReport:
    if n < 2:
        raise BadParams("need at least 2 samples for a standard error")
    mean = dists_sum / n
    var = max(0.0, (dists_sumsq - n * mean * mean) / (n - 1))
    return McReport(
        estimate=float(mean),
        std_error=float(math.sqrt(var / n)),
        n=int(n),
        seed=int(seed),
        elapsed=time.perf_counter() - t0,
        extras=extras or {},
    )


def mc_mean_distance_to_h0(k: int, sigma: float, n: int, seed: int = 0) -> McReport:
    """E[max - 2nd max of k i.i.d. N(0, sigma^2)]: distance to the zero-normal hyperplane."""
    if k < 2:
        raise BadParams(f"need k >= 2 coordinates, got k={k}")
    if n < 2:
        raise BadParams("need n >= 2")
    if sigma < 0 or not math.isfinite(sigma):
        raise BadParams(f"sigma must be a finite nonnegative real, got {sigma}")
    t0 = time.perf_counter()
    rng = make_generator(seed)
    total = 0.0
    total_sq = 0.0
    chunk = max(1, _CHUNK_ROWS // k)  # fixed rows per chunk keeps reductions reproducible
    done = 0
    while done < n:
        b = min(chunk, n - done)
        z = sigma * standard_normals(rng, (b, k))
        part = np.partition(z, k - 2, axis=1)
        dist = part[:, -1] - part[:, -2]
        total += float(dist.sum())
        total_sq += float((dist * dist).sum())
        done += b
    return _report(total, total_sq, n, seed, t0)


# ---- structured-space projection residuals -----------------------------------------


@dataclass(frozen=True)
class McSpaceParams:
    """Parameters of the projection-residual experiments.

    ``mu`` are the finite diagonal entries of the axis-aligned generator
    (length m); defaults to (3, 1, -1, ...) when omitted.  ``correlated``
    switches the first m coordinates to the shared-noise model.  The
    two-center experiment ignores mu/m/correlated and uses the fixed
    (5, -5, 0, ...) / (-5, 5, 0, ...) pair of centers.
    """

    d: int
    m: int = 2
    mu: Optional[Tuple[float, ...]] = None
    correlated: bool = False
    crosscheck_fraction: float = 0.01

    def resolved_mu(self) -> np.ndarray:
        if self.mu is not None:
            arr = np.asarray(self.mu, dtype=float)
            if arr.shape != (self.m,):
                raise BadParams(f"mu must have length m={self.m}, got {arr.shape}")
            return arr
        return 3.0 - 2.0 * np.arange(self.m)


def two_center_matrix(d: int) -> TropMatrix:
    """Rank-2 generator with rows (5, -5, 0, ..., 0) and (-5, 5, 0, ..., 0)."""
    if d < 3:
        raise BadParams(f"two-center space needs d >= 3, got d={d}")
    entries = np.zeros((2, d))
    entries[0, 0], entries[0, 1] = 5.0, -5.0
    entries[1, 0], entries[1, 1] = -5.0, 5.0
    return TropMatrix(entries)


def two_center_closed_form(component: np.ndarray, eps: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Draws around the two centers, their projections, distances, and exclusions.

    For a draw around (5, -5, 0, ...) the projection is
    (5 + a, -5 + e_2, a, ..., a) with a = min of the offsets excluding e_2 and
    distance (max excluding e_2) - a; around (-5, 5, 0, ...) symmetrically
    with b = min of the offsets excluding e_1.  The closed form is valid on
    the event that every offset has magnitude below 5; rows violating it are
    flagged for exclusion.
    """
    n, d = eps.shape
    if d < 3:
        raise BadParams(f"two-center closed form needs d >= 3, got d={d}")
    comp = np.asarray(component, dtype=bool)  # False: first center, True: second
    points = eps.copy()
    points[:, 0] += np.where(comp, -5.0, 5.0)
    points[:, 1] += np.where(comp, 5.0, -5.0)

    # min/max of the offsets excluding coordinate 2 (first center) or 1 (second)
    masked_lo = eps.copy()
    masked_hi = eps.copy()
    skip = np.where(comp, 0, 1)
    rows = np.arange(n)
    masked_lo[rows, skip] = np.inf
    masked_hi[rows, skip] = -np.inf
    mins = masked_lo.min(axis=1)
    maxs = masked_hi.max(axis=1)

    proj = np.broadcast_to(mins[:, None], (n, d)).copy()
    proj[~comp, 0] = 5.0 + mins[~comp]
    proj[~comp, 1] = -5.0 + eps[~comp, 1]
    proj[comp, 0] = -5.0 + eps[comp, 0]
    proj[comp, 1] = 5.0 + mins[comp]

    dists = maxs - mins
    excluded = (np.abs(eps) >= 5.0).any(axis=1)
    return points, proj, dists, excluded


def _space_for_kind(space_kind: str, params: McSpaceParams) -> StiefelSpace:
    if space_kind == "two_gaussian_A0":
        return StiefelSpace.from_matrix(two_center_matrix(params.d))
    return StiefelSpace.from_matrix(axis_aligned_matrix(params.resolved_mu(), params.d))


def mc_projection_residual(space_kind: str, params: McSpaceParams, sigma: float, n: int,
                           seed: int = 0) -> McReport:
    """E[d_tr(X, X')] for draws X projected onto a structured space.

    X' is evaluated by the closed forms (offset clipping at the m-th smallest
    offset for axis-aligned spaces; the two-center formulas otherwise) and
    cross-validated against the general projection rule on a deterministic
    subsample (``params.crosscheck_fraction`` of the draws).  The report
    carries the analytic upper bound for the configuration.
    """
    if space_kind not in ("A1", "Am", "two_gaussian_A0"):
        raise BadParams(f"unknown space kind {space_kind!r}")
    if n < 2:
        raise BadParams("need n >= 2")
    if sigma < 0 or not math.isfinite(sigma):
        raise BadParams(f"sigma must be a finite nonnegative real, got {sigma}")
    d = params.d
    if space_kind == "A1" and params.m != 2:
        params = McSpaceParams(d=d, m=2, mu=params.mu, correlated=params.correlated,
                               crosscheck_fraction=params.crosscheck_fraction)
    m = params.m
    if not 1 <= m < d:
        raise RankExceedsDim(f"need 1 <= m < d, got m={m}, d={d}")

    t0 = time.perf_counter()
    rng = make_generator(seed)

    if space_kind == "two_gaussian_A0":
        comp = make_generator(seed ^ 0x9E3779B97F4A7C15).random(n) < 0.5
        eps = sigma * standard_normals(rng, (n, d))
        points, proj, dists, excluded = two_center_closed_form(comp, eps)
        kept = ~excluded
        n_kept = int(kept.sum())
        bound = 2.0 * sigma * math.sqrt(2.0 * math.log(d - 1))
        bound_formula = "2*sigma*sqrt(2*log(d-1))"
        extras: Dict[str, object] = {
            "bound": bound,
            "bound_formula": bound_formula,
            "exclusion_rate": float(excluded.mean()),
        }
        kept_d = dists[kept]
        report = _report(float(kept_d.sum()), float((kept_d * kept_d).sum()), n_kept, seed, t0, extras)
    else:
        mu = params.resolved_mu()
        eps = sigma * standard_normals(rng, (n, d))
        points, proj, dists = axis_aligned_batch(mu, eps, correlated=params.correlated)
        if params.correlated:
            bound = 2.0 * m * sigma * math.sqrt(2.0 * math.log(d))
            bound_formula = "2*m*sigma*sqrt(2*log(d))"
        else:
            bound = 2.0 * sigma * math.sqrt(2.0 * math.log(d))
            bound_formula = "2*sigma*sqrt(2*log(d))"
        kept = np.ones(n, dtype=bool)
        extras = {"bound": bound, "bound_formula": bound_formula, "exclusion_rate": 0.0}
        report = _report(float(dists.sum()), float((dists * dists).sum()), n, seed, t0, extras)

    n_check = int(math.ceil(n * params.crosscheck_fraction)) if params.crosscheck_fraction > 0 else 0
    if n_check:
        take = np.nonzero(kept[:n_check])[0]
        if take.size:
            space = _space_for_kind(space_kind, params)
            reference = blue_rule_project_batch(space, canonicalize_rows(points[take]))
            closed = canonicalize_rows(proj[take])
            report.extras["crosscheck_n"] = int(take.size)
            report.extras["crosscheck_max_dev"] = float(np.abs(reference - closed).max())
    report.elapsed = time.perf_counter() - t0
    return report


def mc_center_bias(d: int, sigma: float, n_inner: int, n_outer: int, seed: int = 0) -> McReport:
    """E[d_tr(X_i, sample mean)] for replications of n_inner Gaussian draws.

    Each replication contributes the average over its n_inner draws; the
    standard error is taken across replications.  The analytic bound is
    sqrt((n_inner - 1) / n_inner) * 2 * sigma * sqrt(2 log d).
    """
    if n_inner < 2:
        raise BadParams("need n_inner >= 2")
    if n_outer < 2:
        raise BadParams("need n_outer >= 2")
    if d < 2:
        raise BadParams("need d >= 2")
    if sigma < 0 or not math.isfinite(sigma):
        raise BadParams(f"sigma must be a finite nonnegative real, got {sigma}")
    t0 = time.perf_counter()
    rng = make_generator(seed)
    total = 0.0
    total_sq = 0.0
    chunk = 1 << 14  # fixed replication chunk for reproducible reductions
    done = 0
    while done < n_outer:
        b = min(chunk, n_outer - done)
        X = sigma * standard_normals(rng, (b, n_inner, d))
        mean = X.mean(axis=1, keepdims=True)
        diffs = X - mean
        dtr = diffs.max(axis=2) - diffs.min(axis=2)
        rep = dtr.mean(axis=1)
        total += float(rep.sum())
        total_sq += float((rep * rep).sum())
        done += b
    bound = math.sqrt((n_inner - 1) / n_inner) * 2.0 * sigma * math.sqrt(2.0 * math.log(d))
    extras = {"bound": bound, "bound_formula": "sqrt((n-1)/n)*2*sigma*sqrt(2*log(d))"}
    return _report(total, total_sq, n_outer, seed, t0, extras)
