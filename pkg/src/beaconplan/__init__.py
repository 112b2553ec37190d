"""Indoor-positioning deployment planner.

Closed-form signal-strength and localization-error fields for RSS
fingerprinting, pedestrian dead reckoning, and their inverse-variance
fusion, plus simulated-annealing beacon placement, a Monte-Carlo
validation harness, a batch CLI, and an HTTP service for the planner UI.
"""

from .anneal import SaConfig, SaResult, anneal, objective
from .errormap import GridMean, fused_error_map, grid_mean, rss_error_map, strength_map
from .fields import BACKEND as FIELD_BACKEND
from .fusion import (
    CurvePoint,
    PositionEstimate,
    fuse_positions,
    fused_curve,
    fused_rmse,
    fused_variance,
    weighted_ls,
)
from .geometry import (
    UNBOUNDED,
    Beacon,
    BeaconLayout,
    ErrorGrid,
    Floorplan,
    GridSpec,
    NoInformationError,
    Point2,
    Trajectory,
    cell_center,
    read_grid_csv,
    trajectory_point,
    write_grid_csv,
)
from .montecarlo import SimConfig, empirical_fim, sample_rss, simulate_walk, validate_fusion
from .pdr import PdrErrorEstimate, PdrParams, heading_drift, pdr_rmse, sigma_g, sigma_s
from .project import Project, ProjectValidationError, export_project, load_project
from .rss import AxisVariances, ChannelModel, Fim2, crlb, fim, predict_rss, rss_rmse

__version__ = "0.1.0"

__all__ = [
    "AxisVariances",
    "Beacon",
    "BeaconLayout",
    "ChannelModel",
    "CurvePoint",
    "ErrorGrid",
    "FIELD_BACKEND",
    "Fim2",
    "Floorplan",
    "GridMean",
    "GridSpec",
    "NoInformationError",
    "PdrErrorEstimate",
    "PdrParams",
    "Point2",
    "PositionEstimate",
    "Project",
    "ProjectValidationError",
    "SaConfig",
    "SaResult",
    "SimConfig",
    "Trajectory",
    "UNBOUNDED",
    "anneal",
    "cell_center",
    "crlb",
    "empirical_fim",
    "export_project",
    "fim",
    "fuse_positions",
    "fused_curve",
    "fused_error_map",
    "fused_rmse",
    "fused_variance",
    "grid_mean",
    "heading_drift",
    "load_project",
    "objective",
    "pdr_rmse",
    "predict_rss",
    "read_grid_csv",
    "rss_error_map",
    "rss_rmse",
    "sample_rss",
    "sigma_g",
    "sigma_s",
    "simulate_walk",
    "strength_map",
    "trajectory_point",
    "validate_fusion",
    "weighted_ls",
    "write_grid_csv",
]
