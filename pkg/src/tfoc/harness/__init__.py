"""Experiment harness: configs, the four theorem-level experiments, reports."""

from .config import ExperimentConfig, RunConfig, config_hash, load_config
from .experiments import (
    EXPERIMENTS,
    exp_boundedness_M1_Minf,
    exp_boundedness_Mp,
    exp_kernel_continuity,
    exp_schatten_membership,
)
from .runner import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, run_all, run_experiment

__all__ = [
    "ExperimentConfig",
    "RunConfig",
    "config_hash",
    "load_config",
    "EXPERIMENTS",
    "exp_boundedness_M1_Minf",
    "exp_boundedness_Mp",
    "exp_kernel_continuity",
    "exp_schatten_membership",
    "run_all",
    "run_experiment",
    "EXIT_OK",
    "EXIT_FAIL",
    "EXIT_CONFIG",
]
