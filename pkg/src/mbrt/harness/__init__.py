"""Experiment orchestration, evaluation metrics, CLI, and result emission."""

from mbrt.harness.config import ExperimentConfig, load_experiment_config
from mbrt.harness.evalmetrics import EvalSummary, evaluate, evaluate_with_invariance, invariance_rate
from mbrt.harness.experiments import (
    ablate_k,
    background_color_experiment,
    composed_shift_experiment,
    model_quality_study,
)
from mbrt.harness.results import read_csv, svg_line_plot, write_csv

__all__ = [
    "EvalSummary",
    "ExperimentConfig",
    "ablate_k",
    "background_color_experiment",
    "composed_shift_experiment",
    "evaluate",
    "evaluate_with_invariance",
    "invariance_rate",
    "load_experiment_config",
    "model_quality_study",
    "read_csv",
    "svg_line_plot",
    "write_csv",
]
