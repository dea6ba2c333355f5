"""tropfit: max-plus tropical linear spaces and curves.

Projection (exact nearest-point rules), fitting (Fermat-Weber medians,
best-fit hyperplanes and rank-m spaces, interpolating curves), and Monte
Carlo verification of the Gaussian residual bounds.
"""

from .core import NEG_INF, TropPoint, canonicalize, trop_add, trop_distance, trop_mul
from .curves import TropPoly2, curve_cells, curve_membership_residual, fit_linear_curve, fit_quadratic_curve, project_to_curve
from .fitting import FitResult, GridSpec, Sample, contour_grid, fermat_weber, fit_hyperplane, fit_stiefel, two_point_stiefel
from .linalg import PluckerVector, TropMatrix, plucker_from_matrix, tdet, validate_plucker
from .montecarlo import (
    McReport,
    McSpaceParams,
    MixtureComponent,
    MixtureSpec,
    Noise,
    mc_center_bias,
    mc_mean_distance_to_h0,
    mc_projection_residual,
    sample_mixture,
)
from .spaces import (
    HyperplaneNormal,
    StiefelSpace,
    axis_aligned_projection_formula,
    axis_aligned_space,
    blue_rule_project,
    hyperplane_distance,
    hyperplane_space,
    membership_residual,
    red_rule_residual,
)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF", "TropPoint", "canonicalize", "trop_add", "trop_distance", "trop_mul",
    "TropPoly2", "curve_cells", "curve_membership_residual", "fit_linear_curve",
    "fit_quadratic_curve", "project_to_curve",
    "FitResult", "GridSpec", "Sample", "contour_grid", "fermat_weber",
    "fit_hyperplane", "fit_stiefel", "two_point_stiefel",
    "PluckerVector", "TropMatrix", "plucker_from_matrix", "tdet", "validate_plucker",
    "McReport", "McSpaceParams", "MixtureComponent", "MixtureSpec", "Noise",
    "mc_center_bias", "mc_mean_distance_to_h0", "mc_projection_residual", "sample_mixture",
    "HyperplaneNormal", "StiefelSpace", "axis_aligned_projection_formula",
    "axis_aligned_space", "blue_rule_project", "hyperplane_distance", "hyperplane_space",
    "membership_residual", "red_rule_residual",
]
