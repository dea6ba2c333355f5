"""Command-line front end.

Subcommands: ``project`` (points onto a space or curve), ``fit`` (hyperplane /
stiefel / fw / curve), ``mc`` (Monte Carlo experiments), ``contour``
(objective grids for d = 3), and ``serve`` (HTTP API).

Exit codes: 0 success, 2 parse error, 3 dimension or contract violation,
4 infeasible or degenerate input, 5 size limit.  Structured output goes to
``--out`` files (written atomically); stdout carries the headline number.
"""

from __future__ import annotations

import functools
import json
import sys
from typing import Dict, List, Optional, Tuple

import click
import numpy as np

from . import serialize
from .core import trop_distance
from .curves import TropPoly2, curve_membership_residual, fit_linear_curve, fit_quadratic_curve, project_to_curve
from .errors import (
    BadParams,
    BadWeights,
    Degenerate,
    DegeneratePlucker,
    DegenerateSlope,
    DimMismatch,
    DimTooSmall,
    EmptyGrid,
    Infeasible,
    InvalidPlucker,
    LimitExceeded,
    NonFinite,
    NotGeneralPosition,
    NotSquare,
    ParseError,
    RankExceedsDim,
    TropfitError,
    UnsupportedDim,
)
from .fitting import FitResult, GridSpec, Sample, contour_grid, fermat_weber, fit_hyperplane, fit_stiefel, two_point_stiefel
from .montecarlo import McSpaceParams, mc_center_bias, mc_mean_distance_to_h0, mc_projection_residual
from .spaces import membership_residual, project_with_distances

EXIT_PARSE = 2
EXIT_CONTRACT = 3
EXIT_DEGENERATE = 4
EXIT_LIMIT = 5

_EXIT_CODES = (
    (ParseError, EXIT_PARSE),
    ((NotGeneralPosition, DegenerateSlope, Infeasible, Degenerate, DegeneratePlucker), EXIT_DEGENERATE),
    (LimitExceeded, EXIT_LIMIT),
    (
        (DimMismatch, DimTooSmall, UnsupportedDim, RankExceedsDim, NotSquare,
         NonFinite, InvalidPlucker, EmptyGrid, BadParams, BadWeights),
        EXIT_CONTRACT,
    ),
)


def _exit_code(exc: TropfitError) -> int:
    for types, code in _EXIT_CODES:
        if isinstance(exc, types):
            return code
    return EXIT_CONTRACT


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TropfitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))

    return wrapper


def _parse_range(text: str) -> Tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise ParseError(f"bad range {text!r}, expected a:b") from exc


@click.group()
def main():
    """Tropical linear spaces and curves: projection, fitting, Monte Carlo."""


# ---- project ------------------------------------------------------------------------


@main.command()
@click.option("--space", "space_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Space JSON (subset coordinates or generator matrix).")
@click.option("--curve", "curve_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Curve JSON (degree, wxx, wx, wy).")
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@handle_errors
def project(space_path, curve_path, points_path, out_path):
    """Project points onto a space or a curve; writes a CSV of projections."""
    if (space_path is None) == (curve_path is None):
        raise click.UsageError("exactly one of --space / --curve is required")
    sample = serialize.load_points_csv(points_path)
    X = sample.coords
    if space_path is not None:
        space = serialize.load_space_json(space_path)
        if space.d != sample.d:
            raise DimMismatch(
                f"{points_path}: points have d={sample.d} but {space_path} has d={space.d}"
            )
        proj, dists = project_with_distances(space, X)
        residuals = np.array([membership_residual(space, row) for row in proj])
    else:
        curve = serialize.load_curve_json(curve_path)
        if sample.d != 3:
            raise DimMismatch(f"{points_path}: curves need d=3 points, got d={sample.d}")
        proj = np.empty_like(X)
        dists = np.empty(sample.n)
        residuals = np.empty(sample.n)
        for i in range(sample.n):
            q, dist = project_to_curve(curve, X[i])
            proj[i] = q.coords
            dists[i] = dist
            residuals[i] = curve_membership_residual(curve, q)
    serialize.atomic_write_text(out_path, serialize.projection_csv(X, proj, dists, residuals))
    click.echo(serialize.format_number(float(dists.sum())))


# ---- fit ----------------------------------------------------------------------------


@main.group()
def fit():
    """Fit a hyperplane, rank-m space, Fermat-Weber point, or curve."""


def _emit_fit(result: FitResult, out_path: Optional[str]) -> None:
    if out_path:
        serialize.atomic_write_text(out_path, serialize.dumps_json(serialize.fit_result_to_json_dict(result)))
    click.echo(serialize.format_number(result.objective))


@fit.command("hyperplane")
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--range", "range_text", default="-10:10", show_default=True, help="Grid range a:b.")
@click.option("--step", type=float, default=0.1, show_default=True)
@click.option("--refine/--no-refine", default=True, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@handle_errors
def fit_hyperplane_cmd(points_path, range_text, step, refine, out_path):
    sample = serialize.load_points_csv(points_path)
    lo, hi = _parse_range(range_text)
    result = fit_hyperplane(sample, GridSpec(lo, hi, step), refine=refine)
    _emit_fit(result, out_path)


@fit.command("stiefel")
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--m", "m", type=int, required=True, help="Number of generator rows.")
@click.option("--restarts", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@handle_errors
def fit_stiefel_cmd(points_path, m, restarts, seed, out_path):
    sample = serialize.load_points_csv(points_path)
    if sample.n == 2 and m == 2:
        # two points in general position admit the exact rank-2 space
        try:
            space = two_point_stiefel(sample.point(0), sample.point(1))
            proj, dists = project_with_distances(space, sample.coords)
            _emit_fit(
                FitResult(space=space, objective=float(dists.sum()), projections=proj,
                          distances=dists, iterations=0, restarts=0),
                out_path,
            )
            return
        except NotGeneralPosition:
            pass  # fall back to the local search
    result = fit_stiefel(sample, m=m, restarts=restarts, seed=seed)
    _emit_fit(result, out_path)


@fit.command("fw")
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@handle_errors
def fit_fw_cmd(points_path, out_path):
    sample = serialize.load_points_csv(points_path)
    point, objective = fermat_weber(sample)
    proj = np.tile(point.coords, (sample.n, 1))
    dists = np.array([trop_distance(point.coords, row) for row in sample.coords])
    result = FitResult(space=point, objective=objective, projections=proj, distances=dists,
                       iterations=0, restarts=0)
    _emit_fit(result, out_path)


@fit.command("curve")
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--degree", type=click.Choice(["1", "2"]), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@handle_errors
def fit_curve_cmd(points_path, degree, out_path):
    sample = serialize.load_points_csv(points_path)
    degree = int(degree)
    if sample.d != 3:
        raise DimMismatch(f"{points_path}: curve fitting needs d=3 points, got d={sample.d}")
    needed = degree + 1
    if sample.n != needed:
        raise DimMismatch(f"{points_path}: degree-{degree} interpolation needs exactly {needed} points, got {sample.n}")
    if degree == 1:
        poly = fit_linear_curve(sample.point(0), sample.point(1))
    else:
        poly = fit_quadratic_curve(sample.point(0), sample.point(1), sample.point(2))
    proj = np.empty_like(sample.coords)
    dists = np.empty(sample.n)
    for i in range(sample.n):
        q, dist = project_to_curve(poly, sample.coords[i])
        proj[i] = q.coords
        dists[i] = dist
    result = FitResult(space=poly, objective=float(dists.sum()), projections=proj,
                       distances=dists, iterations=0, restarts=0)
    _emit_fit(result, out_path)


# ---- mc -----------------------------------------------------------------------------

_EXPERIMENTS = ("h0-distance", "projection-residual", "center-bias")


def _run_mc_row(row: Dict) -> Dict:
    name = row.get("experiment")
    if name not in _EXPERIMENTS:
        raise BadParams(f"unknown experiment {name!r}; choose from {_EXPERIMENTS}")
    seed = int(row.get("seed", 0))
    sigma = float(row.get("sigma", 1.0))
    n = int(row.get("n", 100_000))
    if name == "h0-distance":
        k = int(row.get("k", 2))
        report = mc_mean_distance_to_h0(k=k, sigma=sigma, n=n, seed=seed)
        params = {"k": k, "sigma": sigma, "n": n}
    elif name == "projection-residual":
        d = int(row.get("d", 4))
        space = str(row.get("space", "Am"))
        m = int(row.get("m", 2))
        mu = row.get("mu")
        mu = tuple(float(v) for v in mu) if mu is not None else None
        correlated = bool(row.get("correlated", False))
        params_obj = McSpaceParams(d=d, m=m, mu=mu, correlated=correlated)
        report = mc_projection_residual(space, params_obj, sigma=sigma, n=n, seed=seed)
        params = {"d": d, "space": space, "m": m, "sigma": sigma, "n": n, "correlated": correlated}
        if mu is not None:
            params["mu"] = list(mu)
    else:
        d = int(row.get("d", 3))
        n_inner = int(row.get("n_inner", 10))
        n_outer = int(row.get("n_outer", n))
        report = mc_center_bias(d=d, sigma=sigma, n_inner=n_inner, n_outer=n_outer, seed=seed)
        params = {"d": d, "sigma": sigma, "n_inner": n_inner, "n_outer": n_outer}
    out = serialize.mc_report_to_json_dict(report, name, params)
    if row.get("gate"):
        out["gate"] = True
    return out


@main.command()
@click.option("--experiment", type=click.Choice(list(_EXPERIMENTS)), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--d", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--m", type=int, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--n", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--space", type=click.Choice(["A1", "Am", "two_gaussian_A0"]), default=None)
@click.option("--correlated", is_flag=True, default=False)
@click.option("--mu", default=None, help="Comma-separated generator diagonal, e.g. 3,-2.")
@click.option("--n-inner", type=int, default=None)
@click.option("--n-outer", type=int, default=None)
@click.option("--gate", is_flag=True, default=False, help="Fail (exit 1) if an estimate exceeds its bound.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@handle_errors
def mc(experiment, config_path, d, k, m, sigma, n, seed, space, correlated, mu, n_inner, n_outer, gate, out_path):
    """Run Monte Carlo experiments; writes one report per configuration row."""
    if config_path is not None:
        rows = serialize.load_mc_config(config_path)
        if experiment is not None:
            rows = [r for r in rows if r.get("experiment") == experiment]
        if not rows:
            raise BadParams("no experiment rows selected")
    else:
        if experiment is None:
            raise click.UsageError("provide --experiment or --config")
        row: Dict = {"experiment": experiment, "gate": gate}
        overrides = {
            "d": d, "k": k, "m": m, "sigma": sigma, "n": n, "seed": seed,
            "space": space, "n_inner": n_inner, "n_outer": n_outer,
        }
        row.update({key: val for key, val in overrides.items() if val is not None})
        if correlated:
            row["correlated"] = True
        if mu is not None:
            row["mu"] = [float(tok) for tok in mu.split(",")]
        rows = [row]

    reports = [_run_mc_row(row) for row in rows]
    failures = []
    for rep in reports:
        click.echo(serialize.format_number(rep["estimate"]))
        if rep.get("gate") and rep.get("bound") is not None and rep["estimate"] > rep["bound"]:
            failures.append(rep)
    if out_path:
        payload = reports[0] if len(reports) == 1 else reports
        serialize.atomic_write_text(out_path, serialize.dumps_json(payload))
    if failures:
        click.echo(f"{len(failures)} bound gate(s) failed", err=True)
        sys.exit(1)


# ---- contour ------------------------------------------------------------------------


@main.command()
@click.option("--points", "points_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice(["hyperplane", "fw", "fermat_weber"]), required=True)
@click.option("--range", "range_text", default="-10:10", show_default=True)
@click.option("--step", type=float, default=0.1, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@handle_errors
def contour(points_path, mode, range_text, step, out_path):
    """Objective grid over normals (hyperplane) or medians (fw); d = 3 only."""
    sample = serialize.load_points_csv(points_path)
    lo, hi = _parse_range(range_text)
    mode_name = "fermat_weber" if mode in ("fw", "fermat_weber") else "hyperplane"
    grid = contour_grid(sample, mode_name, GridSpec(lo, hi, step))
    text = serialize.contour_csv(grid.axis1, grid.axis2, grid.values, grid.min_node,
                                 grid.min_value, grid.mode)
    serialize.atomic_write_text(out_path, text)
    click.echo(serialize.format_number(grid.min_value))


# ---- serve --------------------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP API."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
