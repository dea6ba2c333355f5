"""Tropical polynomial curves of x-degree <= 2 in the 3-torus and exact projection.

A canonical point (0, x, y) of R^3 / R*1 is identified with the chart point
(x, y).  A curve is the locus where the maximum of the monomial values

    degree 1:  { wx + x,  wy + y,  0 }
    degree 2:  { wxx + 2x,  wx + x,  wy + y,  0 }

is attained at least twice (the constant term is pinned to 0).  Each monomial
is affine on the chart, so the curve decomposes into segments and rays where
exactly two monomials tie and dominate, meeting at vertices where three tie.

Projection in the tropical metric searches every cell: along a cell the
distance to a fixed point is convex piecewise-linear in the cell parameter,
so the exact minimum sits at a cell endpoint or at one of the finitely many
breakpoints where the active max/min coordinate of the metric changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import NEG_INF, TropPoint, as_extreal, canonicalize, trop_distance
from .errors import Degenerate, DegenerateSlope, DimMismatch, Infeasible

_TOL = 1e-9

MONOMIALS = ("xx", "x", "y", "0")
_GRADIENTS = {"xx": (2.0, 0.0), "x": (1.0, 0.0), "y": (0.0, 1.0), "0": (0.0, 0.0)}


@dataclass(frozen=True)
class TropPoly2:
    """Coefficients of a tropical polynomial of x-degree <= 2, y-degree <= 1.

    The constant coefficient is fixed at 0.  Degree 1 requires finite wx, wy
    and wxx = -inf; degree 2 requires finite wxx.
    """

    degree: int
    wxx: float
    wx: float
    wy: float

    def __post_init__(self):
        object.__setattr__(self, "wxx", as_extreal(self.wxx))
        object.__setattr__(self, "wx", as_extreal(self.wx))
        object.__setattr__(self, "wy", as_extreal(self.wy))
        if self.degree == 1:
            if self.wxx != NEG_INF:
                raise ValueError("degree-1 curve must have wxx = -inf")
            if self.wx == NEG_INF or self.wy == NEG_INF:
                raise ValueError("degree-1 curve needs finite wx and wy")
        elif self.degree == 2:
            if self.wxx == NEG_INF:
                raise ValueError("degree-2 curve needs finite wxx")
        else:
            raise ValueError(f"degree must be 1 or 2, got {self.degree}")

    @classmethod
    def line(cls, wx: float, wy: float) -> "TropPoly2":
        return cls(degree=1, wxx=NEG_INF, wx=wx, wy=wy)

    @classmethod
    def quadratic(cls, wxx: float, wx: float, wy: float) -> "TropPoly2":
        return cls(degree=2, wxx=wxx, wx=wx, wy=wy)

    def coefficient(self, name: str) -> float:
        return {"xx": self.wxx, "x": self.wx, "y": self.wy, "0": 0.0}[name]

    def active_monomials(self) -> List[Tuple[str, float, float, float]]:
        """(name, gx, gy, coefficient) for monomials with finite coefficient."""
        out = []
        for name in MONOMIALS:
            c = self.coefficient(name)
            if c != NEG_INF:
                gx, gy = _GRADIENTS[name]
                out.append((name, gx, gy, c))
        return out


@dataclass(frozen=True)
class CurveCell:
    """A maximal piece of the curve where one monomial pair ties and dominates.

    ``kind`` is "vertex" (a single chart point, three or more monomials tie),
    "segment" (start to end), or "ray" (start plus t * direction for t >= 0).
    """

    kind: str
    pair: Tuple[str, str]
    start: Tuple[float, float]
    end: Optional[Tuple[float, float]] = None
    direction: Optional[Tuple[float, float]] = None


def chart(pt: Union[TropPoint, Sequence[float]]) -> Tuple[float, float]:
    """Chart coordinates (v2 - v1, v3 - v1) of a 3-torus point."""
    p = pt if isinstance(pt, TropPoint) else canonicalize(pt)
    if p.d != 3:
        raise DimMismatch(f"curves live in the 3-torus, got d={p.d}")
    return float(p.coords[1]), float(p.coords[2])


def chart_point(x: float, y: float) -> TropPoint:
    """Canonical torus point (0, x, y) of a chart point."""
    return TropPoint(np.array([0.0, x, y]))


def monomial_values(f: TropPoly2, x: float, y: float) -> List[Tuple[str, float]]:
    return [(name, c + gx * x + gy * y) for name, gx, gy, c in f.active_monomials()]


def curve_membership_residual(f: TropPoly2, pt: Union[TropPoint, Sequence[float]]) -> float:
    """Max minus second max of the monomial values; zero exactly on the curve."""
    x, y = chart(pt)
    vals = sorted(v for _, v in monomial_values(f, x, y))
    return float(vals[-1] - vals[-2])


def curve_cells(f: TropPoly2, tol: float = _TOL) -> List[CurveCell]:
    """All maximal cells of the curve: rays/segments per tying pair plus vertices.

    For each monomial pair the tie locus is a line in the chart; it is clipped
    by the dominance half-planes of the remaining monomials.  A generic
    degree-1 curve yields one vertex and three rays; a generic degree-2 curve
    yields two vertices, one segment and four rays.  Pairs whose tie line is
    nowhere dominant (for instance the x monomial when its coefficient is too
    small) simply produce no cell.
    """
    monos = f.active_monomials()
    cells: List[CurveCell] = []
    vertex_candidates: List[Tuple[float, float]] = []

    for a in range(len(monos)):
        for b in range(a + 1, len(monos)):
            name_a, gax, gay, ca = monos[a]
            name_b, gbx, gby, cb = monos[b]
            gdx, gdy = gax - gbx, gay - gby
            norm2 = gdx * gdx + gdy * gdy
            # tie line: gd . q = cb - ca
            q0 = ((cb - ca) * gdx / norm2, (cb - ca) * gdy / norm2)
            u = (-gdy, gdx)
            tlo, thi = -math.inf, math.inf
            empty = False
            for k in range(len(monos)):
                if k in (a, b):
                    continue
                name_k, gkx, gky, ck = monos[k]
                # dominance of the tie value over monomial k along q(t):
                # (ga - gk) . (q0 + t u) + ca - ck >= 0
                const = (gax - gkx) * q0[0] + (gay - gky) * q0[1] + ca - ck
                slope = (gax - gkx) * u[0] + (gay - gky) * u[1]
                if abs(slope) <= tol:
                    if const < -tol:
                        empty = True
                        break
                elif slope > 0:
                    tlo = max(tlo, -const / slope)
                else:
                    thi = min(thi, -const / slope)
            if empty or tlo > thi + tol:
                continue
            pair = (name_a, name_b)
            lo_pt = (q0[0] + tlo * u[0], q0[1] + tlo * u[1]) if math.isfinite(tlo) else None
            hi_pt = (q0[0] + thi * u[0], q0[1] + thi * u[1]) if math.isfinite(thi) else None
            if lo_pt is not None:
                vertex_candidates.append(lo_pt)
            if hi_pt is not None:
                vertex_candidates.append(hi_pt)
            if lo_pt is not None and hi_pt is not None:
                if thi - tlo <= tol:
                    continue  # degenerate sliver; the point is kept as a vertex
                cells.append(CurveCell(kind="segment", pair=pair, start=lo_pt, end=hi_pt))
            elif lo_pt is not None:
                cells.append(CurveCell(kind="ray", pair=pair, start=lo_pt, direction=u))
            elif hi_pt is not None:
                cells.append(CurveCell(kind="ray", pair=pair, start=hi_pt, direction=(-u[0], -u[1])))
            else:
                # unclipped tie line (two-monomial curve): split into two rays
                cells.append(CurveCell(kind="ray", pair=pair, start=q0, direction=u))
                cells.append(CurveCell(kind="ray", pair=pair, start=q0, direction=(-u[0], -u[1])))

    seen = set()
    for vx, vy in vertex_candidates:
        key = (round(vx, 9), round(vy, 9))
        if key in seen:
            continue
        seen.add(key)
        vals = sorted(monomial_values(f, vx, vy), key=lambda nv: -nv[1])
        tying = (vals[0][0], vals[1][0])
        cells.append(CurveCell(kind="vertex", pair=tying, start=(vx, vy)))
    return cells


def _cell_param(cell: CurveCell) -> Tuple[Tuple[float, float], Tuple[float, float], float]:
    """(base, direction, t_max) with t in [0, t_max]; t_max = inf for rays."""
    if cell.kind == "segment":
        u = (cell.end[0] - cell.start[0], cell.end[1] - cell.start[1])
        return cell.start, u, 1.0
    if cell.kind == "ray":
        return cell.start, cell.direction, math.inf
    return cell.start, (0.0, 0.0), 0.0


def _min_distance_on_cell(cell: CurveCell, px: float, py: float) -> Tuple[float, Tuple[float, float]]:
    """Exact minimum of d_tr((0,px,py), (0,q(t))) over the cell.

    The three coordinate differences (0, px - qx(t), py - qy(t)) are affine in
    t, so the distance (their max minus min) is convex piecewise-linear; it is
    evaluated at the cell bounds and at every crossing of two difference
    functions.
    """
    (bx, by), (ux, uy), t_max = _cell_param(cell)
    consts = (0.0, px - bx, py - by)
    slopes = (0.0, -ux, -uy)

    def dist_at(t: float) -> float:
        vals = [c + s * t for c, s in zip(consts, slopes)]
        return max(vals) - min(vals)

    if cell.kind == "vertex":
        return dist_at(0.0), (bx, by)

    candidates = [0.0]
    if math.isfinite(t_max):
        candidates.append(t_max)
    for i in range(3):
        for j in range(i + 1, 3):
            ds = slopes[i] - slopes[j]
            if ds != 0.0:
                t = (consts[j] - consts[i]) / ds
                if 0.0 <= t and t <= t_max:
                    candidates.append(t)
    best_t = min(candidates, key=dist_at)
    best = dist_at(best_t)
    if not math.isfinite(t_max):
        # convexity guarantees the tail beyond the last breakpoint is non-decreasing
        tail = max(candidates) + 1.0
        if dist_at(tail) < best - 1e-9:  # pragma: no cover - would indicate a convexity bug
            raise AssertionError("distance decreased beyond the last breakpoint")
    return best, (bx + best_t * ux, by + best_t * uy)


def project_to_curve(f: TropPoly2, pt: Union[TropPoint, Sequence[float]]) -> Tuple[TropPoint, float]:
    """Nearest point of the curve and its tropical distance from pt."""
    px, py = chart(pt)
    best = math.inf
    best_q = None
    for cell in curve_cells(f):
        dist, q = _min_distance_on_cell(cell, px, py)
        if dist < best:
            best, best_q = dist, q
    if best_q is None:  # pragma: no cover - a curve always has cells
        raise Degenerate("curve has no cells")
    return chart_point(best_q[0], best_q[1]), float(best)


# ---- interpolation ------------------------------------------------------------------


def fit_linear_curve(p1: Union[TropPoint, Sequence[float]], p2: Union[TropPoint, Sequence[float]],
                     tol: float = _TOL) -> TropPoly2:
    """The tropical line through two chart points in general position.

    With x1 < x2 (inputs are swapped if needed) and s the slope of the
    connecting Euclidean segment, the coefficients are

        s > 1:      (wx, wy) = (-x1, -x1 + x2 - y2)
        0 < s < 1:  (wx, wy) = (-x2 - y1 + y2, -y1)
        s < 0:      (wx, wy) = (-x2, -y1)

    Slopes 0 and 1 (and vertical segments) admit no unique line.
    """
    x1, y1 = chart(p1)
    x2, y2 = chart(p2)
    if x2 < x1:
        x1, y1, x2, y2 = x2, y2, x1, y1
    if abs(x2 - x1) <= tol:
        raise DegenerateSlope("points share their x chart coordinate")
    slope = (y2 - y1) / (x2 - x1)
    if abs(slope) <= tol or abs(slope - 1.0) <= tol:
        raise DegenerateSlope(f"slope {slope} admits no unique line")
    if slope > 1.0:
        f = TropPoly2.line(-x1, -x1 + x2 - y2)
    elif slope > 0.0:
        f = TropPoly2.line(-x2 - y1 + y2, -y1)
    else:
        f = TropPoly2.line(-x2, -y1)
    for q in ((x1, y1), (x2, y2)):
        if curve_membership_residual(f, chart_point(*q)) > 1e-9:  # pragma: no cover
            raise Degenerate("interpolated line misses an input point")
    return f


def _pair_equation(pair: Tuple[str, str], x: float, y: float) -> Tuple[np.ndarray, float]:
    """Row (coeffs of wxx, wx, wy) and rhs of 'monomial a ties monomial b' at (x, y)."""
    basis = {"xx": np.array([1.0, 0.0, 0.0]), "x": np.array([0.0, 1.0, 0.0]),
             "y": np.array([0.0, 0.0, 1.0]), "0": np.array([0.0, 0.0, 0.0])}
    offset = {"xx": 2 * x, "x": x, "y": y, "0": 0.0}
    a, b = pair
    return basis[a] - basis[b], offset[b] - offset[a]


def fit_quadratic_curve(p1, p2, p3, tol: float = _TOL) -> TropPoly2:
    """The unique x-quadratic curve through three chart points, if it exists.

    Points are sorted by x internally (the result does not depend on input
    order).  With x1 < x2 < x3 and pairwise distinct y, the descending-then-
    steep configuration y1 > y2 with y1 + 2*(x3 - x2) < y3 admits no
    x-quadratic curve at all and raises Infeasible.  Otherwise every
    assignment of the three points to tying monomial pairs is solved as a
    3 x 3 linear system in (wxx, wx, wy) and checked against the dominance
    conditions; a unique consistent curve is returned, while ambiguous or
    empty outcomes (points at vertices, slopes in {0, 1, 2}, ...) raise
    Degenerate.
    """
    pts = sorted((chart(p1), chart(p2), chart(p3)))
    (x1, y1), (x2, y2), (x3, y3) = pts
    if x2 - x1 <= tol or x3 - x2 <= tol:
        raise Degenerate("points must have distinct x chart coordinates")
    if min(abs(y1 - y2), abs(y1 - y3), abs(y2 - y3)) <= tol:
        raise Degenerate("points must have pairwise distinct y chart coordinates")
    if y1 > y2 and y1 + 2.0 * (x3 - x2) < y3:
        raise Infeasible(
            "infeasible configuration: descending first pair with "
            "y1 + 2*(x3 - x2) < y3 admits no x-quadratic curve"
        )

    pairs = [(a, b) for i, a in enumerate(MONOMIALS) for b in MONOMIALS[i + 1 :]]
    n_assign = len(pairs) ** 3
    lhs = np.empty((n_assign, 3, 3))
    rhs = np.empty((n_assign, 3))
    idx = 0
    for pa in pairs:
        ra, ba = _pair_equation(pa, x1, y1)
        for pb in pairs:
            rb, bb = _pair_equation(pb, x2, y2)
            for pc in pairs:
                rc, bc = _pair_equation(pc, x3, y3)
                lhs[idx, 0], lhs[idx, 1], lhs[idx, 2] = ra, rb, rc
                rhs[idx] = (ba, bb, bc)
                idx += 1
    dets = np.abs(np.linalg.det(lhs))
    solvable = dets > 1e-9
    solutions: List[np.ndarray] = []
    if np.any(solvable):
        sols = np.linalg.solve(lhs[solvable], rhs[solvable][..., None])[..., 0]
        for w in sols:
            cand = TropPoly2.quadratic(*w)
            ok = all(
                curve_membership_residual(cand, chart_point(x, y)) <= tol
                for x, y in pts
            )
            if ok:
                solutions.append(w)
    if not solutions:
        raise Degenerate("no consistent cell assignment interpolates the three points")
    stacked = np.stack(solutions)
    distinct = [stacked[0]]
    for w in stacked[1:]:
        if all(np.max(np.abs(w - v)) > 1e-7 for v in distinct):
            distinct.append(w)
    if len(distinct) > 1:
        raise Degenerate("interpolating curve is not unique for this configuration")
    w = distinct[0]
    return TropPoly2.quadratic(float(w[0]), float(w[1]), float(w[2]))
