"""Learned models of natural variation via unpaired translation."""

from mbrt.genmodel.adapter import LearnedVariationModel, into_variation_model, load_learned_model
from mbrt.genmodel.losses import MunitHyper, StylePrior, munit_losses
from mbrt.genmodel.nets import NetConfig, TranslationModel
from mbrt.genmodel.train import (
    Snapshot,
    load_translation_model,
    read_snapshot_manifest,
    save_translation_model,
    train_translation,
    write_snapshot_manifest,
)

__all__ = [
    "LearnedVariationModel",
    "MunitHyper",
    "NetConfig",
    "Snapshot",
    "StylePrior",
    "TranslationModel",
    "into_variation_model",
    "load_learned_model",
    "load_translation_model",
    "munit_losses",
    "read_snapshot_manifest",
    "save_translation_model",
    "train_translation",
    "write_snapshot_manifest",
]
