"""Experiment configuration files.

Plain INI (line-oriented ``key = value`` under ``[sections]``) read with the
stdlib parser; no external config language.  CLI flags override file values.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from mbrt.errors import ConfigError
from mbrt.robusttrain.config import ALGORITHMS, TrainConfig

EXPERIMENT_KINDS = ("train", "eval", "ablate-k", "model-quality", "curate", "learn-model", "compose")


@dataclass
class ExperimentConfig:
    kind: str = "train"
    data: str = ""  # dataset manifest path
    eval_data: str = ""
    model: str = ""  # variation-model descriptor path
    out: str = "results"
    seeds: tuple = (0, 1, 2)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")

    def check_paths(self):
        for label, path in (("data", self.data), ("eval data", self.eval_data),
                            ("model descriptor", self.model)):
            if path and not os.path.exists(path):
                raise ConfigError(f"{label} path does not exist: {path}")


_TRAIN_FIELDS = {
    "algorithm": str, "arch": str, "k": int, "lam": float, "epochs": int,
    "batch_size": int, "optimizer": str, "lr": float, "momentum": float,
    "seed": int, "mrt_granularity": str, "mat_alpha": float, "mat_sign_grad": bool,
    "mda_normalize": bool, "pgd_epsilon": float, "pgd_alpha": float,
    "pgd_steps": int, "dtype": str,
}


def load_experiment_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    cfg = ExperimentConfig()
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        cfg.kind = sec.get("kind", cfg.kind)
        cfg.data = sec.get("data", cfg.data)
        cfg.eval_data = sec.get("eval_data", cfg.eval_data)
        cfg.model = sec.get("model", cfg.model)
        cfg.out = sec.get("out", cfg.out)
        if "seeds" in sec:
            cfg.seeds = tuple(int(s) for s in sec["seeds"].replace(",", " ").split())
    if parser.has_section("train"):
        kwargs = {}
        for key, value in parser["train"].items():
            if key not in _TRAIN_FIELDS:
                raise ConfigError(f"unknown [train] key {key!r}")
            conv = _TRAIN_FIELDS[key]
            kwargs[key] = parser["train"].getboolean(key) if conv is bool else conv(value)
        if kwargs.get("algorithm", "erm") not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {kwargs.get('algorithm')!r}")
        cfg.train = TrainConfig(**kwargs)
    cfg.__post_init__()
    return cfg
