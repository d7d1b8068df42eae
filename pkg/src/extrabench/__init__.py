"""Extrapolation benchmark for classical regressors and a small MLP.

Ten regression models are trained on the left part of an exponentially
growing target function and evaluated on the held-out right tail, to
measure how each model family behaves outside its training range.
"""

__version__ = "0.1.0"

from extrabench.dataset import SampleSet, SplitDataset, SplitSpec, build_dataset
from extrabench.harness import ExperimentConfig, RunReport, run_experiment

__all__ = [
    "SampleSet",
    "SplitDataset",
    "SplitSpec",
    "build_dataset",
    "ExperimentConfig",
    "RunReport",
    "run_experiment",
]
