"""One-bit feedback CSIT estimation for FDD massive MIMO."""
from .config import ConfigurationError, ScenarioConfig
from .evaluation import ALGORITHMS, ExperimentReport, run_experiment, run_trial, snr_loss_db

__all__ = [
    "ALGORITHMS",
    "ConfigurationError",
    "ExperimentReport",
    "ScenarioConfig",
    "run_experiment",
    "run_trial",
    "snr_loss_db",
]
