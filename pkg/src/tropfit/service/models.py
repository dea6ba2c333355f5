"""Pydantic request/response models for the HTTP API.

The wire formats mirror the file formats: subset-coordinate JSON uses
1-based comma-joined keys and the literal "-inf"; points are plain float
rows and are canonicalized server-side.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

Number = Union[float, Literal["-inf"]]


class PluckerModel(BaseModel):
    d: int
    m: int
    coords: Dict[str, Number]


class MatrixModel(BaseModel):
    rows: List[List[Number]]


class CurveModel(BaseModel):
    degree: Literal[1, 2]
    wxx: Number
    wx: Number
    wy: Number


class ProjectRequest(BaseModel):
    points: List[List[float]]
    space: Optional[PluckerModel] = None
    matrix: Optional[MatrixModel] = None
    curve: Optional[CurveModel] = None

    @model_validator(mode="after")
    def _exactly_one_target(self):
        given = [t for t in (self.space, self.matrix, self.curve) if t is not None]
        if len(given) != 1:
            raise ValueError("provide exactly one of space, matrix, curve")
        return self


class ProjectResponse(BaseModel):
    projections: List[List[float]]
    distances: List[float]
    residuals: List[float]
    total_distance: float


class GridModel(BaseModel):
    lo: float = -10.0
    hi: float = 10.0
    step: float = 0.1


class FitHyperplaneRequest(BaseModel):
    points: List[List[float]]
    grid: GridModel = Field(default_factory=GridModel)
    refine: bool = True


class FitStiefelRequest(BaseModel):
    points: List[List[float]]
    m: int
    restarts: int = 5
    seed: int = 0


class FitFermatWeberRequest(BaseModel):
    points: List[List[float]]


class FitCurveRequest(BaseModel):
    points: List[List[float]]
    degree: Literal[1, 2]


class FitResponse(BaseModel):
    objective: float
    projections: List[List[float]]
    distances: List[float]
    iterations: int
    restarts: int
    omega: Optional[List[float]] = None
    plucker: Optional[PluckerModel] = None
    curve: Optional[CurveModel] = None
    point: Optional[List[float]] = None


class McRequest(BaseModel):
    experiment: Literal["h0-distance", "projection-residual", "center-bias"]
    sigma: float = 1.0
    n: int = 100_000
    seed: int = 0
    k: int = 2
    d: int = 4
    m: int = 2
    space: Literal["A1", "Am", "two_gaussian_A0"] = "Am"
    correlated: bool = False
    mu: Optional[List[float]] = None
    n_inner: int = 10
    n_outer: Optional[int] = None


class McResponse(BaseModel):
    experiment: str
    estimate: float
    std_error: float
    n: int
    seed: int
    extras: Dict[str, object] = Field(default_factory=dict)


class ContourRequest(BaseModel):
    points: List[List[float]]
    mode: Literal["hyperplane", "fermat_weber", "fw"] = "hyperplane"
    grid: GridModel = Field(default_factory=GridModel)


class ContourResponse(BaseModel):
    mode: str
    axis1: List[float]
    axis2: List[float]
    values: List[List[float]]
    min_node: List[float]
    min_value: float
