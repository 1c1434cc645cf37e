"""Quartile-fingerprint kNN indoor localization."""

from .geometry import (
    Coordinates3D,
    Scenario,
    build_grid_scenario,
    default_ap_layout,
    euclidean_distance_3d,
    paper_scenario,
)
from .stats import QuartileTriple, mean, quartiles
from .representations import (
    FingerprintInstance,
    PcaModel,
    SampleMatrix,
    TrainingSet,
    build_mean_instance,
    build_quartile_instance,
    build_training_set,
    pca_fit,
    pca_project,
    powed_transform,
)
from .metrics import euclidean, sorensen
from .locator import Locator, MethodConfig, Neighbor, PositionEstimate, k_nearest, localize, majority_rp, weighted_centroid
from .propagation import GenerationSpec, LogNormalParams, QuadraticFit, fit_quadratic, generate_dataset, log_normal_rssi
from .evaluation import EstimateRecord, TreatmentResult, error_cdf, m_sweep, mean_error, mean_time, treatment_grid

__version__ = "0.1.0"
