"""Training configuration and run reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from mbrt.errors import InputError

ALGORITHMS = ("erm", "pgd", "mrt", "mat", "mda")
DEFAULT_K = {"mrt": 10, "mat": 10, "mda": 3, "erm": 1, "pgd": 1}


@dataclass
class TrainConfig:
    algorithm: str = "erm"
    arch: str = "in3x28x28,c8-3,p2,c16-3,p2,flat,fc32,fc10"
    k: int | None = None  # None -> the algorithm's default (MRT 10, MAT 10, MDA 3)
    lam: float = 1.0  # clean-loss trade-off
    epochs: int = 8
    batch_size: int = 64
    optimizer: str = "adadelta"
    lr: float = 1.0
    momentum: float = 0.9
    seed: int = 0
    mrt_granularity: str = "batch"  # paper-faithful; "per-example" is the stronger adversary
    mat_alpha: float | None = None  # None -> 0.1 * box width
    mat_sign_grad: bool = False
    mda_normalize: bool = False  # False: verbatim sum over the k generated losses
    pgd_epsilon: float = 8.0 / 255.0
    pgd_alpha: float = 0.01
    pgd_steps: int = 20
    dtype: str = "float64"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.k is None:
            self.k = DEFAULT_K[self.algorithm]
        if self.k < 1:
            raise InputError("k must be >= 1")
        if self.lam < 0:
            raise InputError("the trade-off parameter lambda must be nonnegative")
        if self.mrt_granularity not in ("batch", "per-example"):
            raise InputError(f"bad mrt granularity {self.mrt_granularity!r}")
        if self.dtype not in ("float64", "float32"):
            raise InputError(f"dtype must be float64 or float32, got {self.dtype!r}")

    @property
    def np_dtype(self):
        return np.float64 if self.dtype == "float64" else np.float32


@dataclass
class EpochStats:
    epoch: int
    clean_loss: float
    model_loss: float
    top1: float
    wall_time: float


@dataclass
class TrainReport:
    config: TrainConfig
    epochs: list = field(default_factory=list)  # of EpochStats
    params: object = None  # final ClassifierParams
    mat_alpha_used: float | None = None
    evals: dict = field(default_factory=dict)
    started: float = field(default_factory=time.time)

    def metrics_lines(self):
        yield "epoch\tclean_loss\tmodel_loss\ttop1"
        for s in self.epochs:
            yield f"{s.epoch}\t{s.clean_loss:.6f}\t{s.model_loss:.6f}\t{s.top1:.4f}"

    def write_metrics_log(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.metrics_lines()) + "\n")
