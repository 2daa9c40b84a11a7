"""Robust training: ERM, PGD, and the model-based algorithms MRT/MAT/MDA."""

from mbrt.robusttrain.config import ALGORITHMS, DEFAULT_K, EpochStats, TrainConfig, TrainReport
from mbrt.robusttrain.inner import brute_force_inner, mat_ascent, mda_augment, mrt_select, pgd_inner
from mbrt.robusttrain.loop import default_mat_alpha, erm_train, model_train, pgd_train, train

__all__ = [
    "ALGORITHMS",
    "DEFAULT_K",
    "EpochStats",
    "TrainConfig",
    "TrainReport",
    "brute_force_inner",
    "default_mat_alpha",
    "erm_train",
    "mat_ascent",
    "mda_augment",
    "model_train",
    "mrt_select",
    "pgd_inner",
    "pgd_train",
    "train",
]
