"""Desk-scale simulator for multi-UAV mmWave beam tracking with echo-based
identity association."""

from .upa import Angles, LinkBudget, UpaConfig, steering_vector, array_gain
from .fleet import FleetConfig, UavTruth, init_fleet, step_motion, true_geometry
from .sensing import Measurement, SensingConfig
from .tracking import NoiseModel, Prediction, TrackState, ekf_step, predict
from .identity import FeatureSet, SimilarityMatrix, similarity_matrix
from .assignment import Assignment, solve_exact, solve_local_search
from .simulate import MetricsSummary, SimConfig, TrialResult, run_monte_carlo, run_trial

__all__ = [
    "Angles", "LinkBudget", "UpaConfig", "steering_vector", "array_gain",
    "FleetConfig", "UavTruth", "init_fleet", "step_motion", "true_geometry",
    "Measurement", "SensingConfig",
    "NoiseModel", "Prediction", "TrackState", "ekf_step", "predict",
    "FeatureSet", "SimilarityMatrix", "similarity_matrix",
    "Assignment", "solve_exact", "solve_local_search",
    "MetricsSummary", "SimConfig", "TrialResult", "run_monte_carlo", "run_trial",
]

__version__ = "0.1.0"
