"""FastAPI application exposing projection, fitting, Monte Carlo, and contours."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import serialize
from ..curves import curve_membership_residual, fit_linear_curve, fit_quadratic_curve, project_to_curve
from ..errors import LimitExceeded, ParseError, TropfitError
from ..fitting import FitResult, GridSpec, Sample, contour_grid, fermat_weber, fit_hyperplane, fit_stiefel
from ..montecarlo import McSpaceParams, mc_center_bias, mc_mean_distance_to_h0, mc_projection_residual
from ..spaces import StiefelSpace, membership_residual, project_with_distances
from .models import (
    ContourRequest,
    ContourResponse,
    FitCurveRequest,
    FitFermatWeberRequest,
    FitHyperplaneRequest,
    FitResponse,
    FitStiefelRequest,
    McRequest,
    McResponse,
    ProjectRequest,
    ProjectResponse,
)


def _sample(points) -> Sample:
    try:
        return Sample.from_rows(np.asarray(points, dtype=float))
    except (ValueError, TropfitError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _fit_response(result: FitResult) -> FitResponse:
    payload = serialize.fit_result_to_json_dict(result)
    return FitResponse(**payload)


def create_app() -> FastAPI:
    app = FastAPI(title="tropfit", version="0.1.0",
                  description="Tropical linear spaces and curves over the max-plus semiring")

    @app.exception_handler(TropfitError)
    async def _domain_error(request, exc: TropfitError):
        from fastapi.responses import JSONResponse

        status = 422 if isinstance(exc, ParseError) else 400
        if isinstance(exc, LimitExceeded):
            status = 413
        return JSONResponse(status_code=status, content={"detail": str(exc), "kind": type(exc).__name__})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/project", response_model=ProjectResponse)
    def project(req: ProjectRequest) -> ProjectResponse:
        sample = _sample(req.points)
        if req.curve is not None:
            curve = serialize.curve_from_json_dict(req.curve.model_dump())
            proj = np.empty_like(sample.coords)
            dists = np.empty(sample.n)
            residuals = np.empty(sample.n)
            for i in range(sample.n):
                q, dist = project_to_curve(curve, sample.coords[i])
                proj[i] = q.coords
                dists[i] = dist
                residuals[i] = curve_membership_residual(curve, q)
        else:
            if req.space is not None:
                space = StiefelSpace(serialize.plucker_from_json_dict(req.space.model_dump()))
            else:
                space = StiefelSpace.from_matrix(serialize.matrix_from_json_dict(req.matrix.model_dump()))
            proj, dists = project_with_distances(space, sample.coords)
            residuals = np.array([membership_residual(space, row) for row in proj])
        return ProjectResponse(
            projections=proj.tolist(),
            distances=dists.tolist(),
            residuals=residuals.tolist(),
            total_distance=float(dists.sum()),
        )

    @app.post("/fit/hyperplane", response_model=FitResponse)
    def fit_hyperplane_route(req: FitHyperplaneRequest) -> FitResponse:
        sample = _sample(req.points)
        grid = GridSpec(req.grid.lo, req.grid.hi, req.grid.step)
        return _fit_response(fit_hyperplane(sample, grid, refine=req.refine))

    @app.post("/fit/stiefel", response_model=FitResponse)
    def fit_stiefel_route(req: FitStiefelRequest) -> FitResponse:
        sample = _sample(req.points)
        return _fit_response(fit_stiefel(sample, m=req.m, restarts=req.restarts, seed=req.seed))

    @app.post("/fit/fermat_weber", response_model=FitResponse)
    def fit_fw_route(req: FitFermatWeberRequest) -> FitResponse:
        sample = _sample(req.points)
        point, objective = fermat_weber(sample)
        diffs = point.coords[None, :] - sample.coords
        dists = diffs.max(axis=1) - diffs.min(axis=1)
        result = FitResult(space=point, objective=objective,
                           projections=np.tile(point.coords, (sample.n, 1)),
                           distances=dists, iterations=0, restarts=0)
        return _fit_response(result)

    @app.post("/fit/curve", response_model=FitResponse)
    def fit_curve_route(req: FitCurveRequest) -> FitResponse:
        sample = _sample(req.points)
        needed = req.degree + 1
        if sample.n != needed:
            raise HTTPException(status_code=422,
                                detail=f"degree-{req.degree} interpolation needs exactly {needed} points")
        if req.degree == 1:
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
        return _fit_response(result)

    @app.post("/mc", response_model=McResponse)
    def mc_route(req: McRequest) -> McResponse:
        if req.experiment == "h0-distance":
            report = mc_mean_distance_to_h0(k=req.k, sigma=req.sigma, n=req.n, seed=req.seed)
        elif req.experiment == "projection-residual":
            params = McSpaceParams(d=req.d, m=req.m,
                                   mu=tuple(req.mu) if req.mu is not None else None,
                                   correlated=req.correlated)
            report = mc_projection_residual(req.space, params, sigma=req.sigma, n=req.n, seed=req.seed)
        else:
            n_outer = req.n_outer if req.n_outer is not None else req.n
            report = mc_center_bias(d=req.d, sigma=req.sigma, n_inner=req.n_inner,
                                    n_outer=n_outer, seed=req.seed)
        return McResponse(experiment=req.experiment, estimate=report.estimate,
                          std_error=report.std_error, n=report.n, seed=report.seed,
                          extras=report.extras)

    @app.post("/contour", response_model=ContourResponse)
    def contour_route(req: ContourRequest) -> ContourResponse:
        sample = _sample(req.points)
        mode = "fermat_weber" if req.mode in ("fw", "fermat_weber") else "hyperplane"
        grid = contour_grid(sample, mode, GridSpec(req.grid.lo, req.grid.hi, req.grid.step))
        return ContourResponse(
            mode=grid.mode,
            axis1=grid.axis1.tolist(),
            axis2=grid.axis2.tolist(),
            values=grid.values.tolist(),
            min_node=list(grid.min_node),
            min_value=grid.min_value,
        )

    return app
