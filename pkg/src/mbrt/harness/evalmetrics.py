"""Classifier evaluation: top-1/top-5 accuracy and argmax invariance rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.diffcore.net import ClassifierParams, net_forward
from mbrt.errors import InputError
from mbrt.variation.models import VariationModel
from mbrt.variation.space import sample_uniform_many


@dataclass
class EvalSummary:
    top1: float  # percent
    top5: float  # percent
    invariance: float | None  # fraction, when a model was supplied
    count: int

    def __post_init__(self):
        if not 0.0 <= self.top1 <= self.top5 <= 100.0:
            raise InputError(f"inconsistent accuracies: top1={self.top1}, top5={self.top5}")


def _logits(params: ClassifierParams, images, batch_size=256):
    out = []
    for start in range(0, len(images), batch_size):
        logits, _ = net_forward(params.net, params.w, images[start : start + batch_size])
        out.append(logits)
    return np.concatenate(out)


def _predictions(params, images):
    return _logits(params, images).argmax(axis=1)  # first maximizer: lowest class index


def evaluate(params: ClassifierParams, dataset: Dataset) -> EvalSummary:
    """Deterministic top-1/top-5; rank ties break toward the lowest class index."""
    labels = dataset.require_labels()
    logits = _logits(params, dataset.images)
    top1 = float((logits.argmax(axis=1) == labels).mean() * 100.0)
    # stable argsort on -logits ranks equal logits by ascending class index
    order = np.argsort(-logits, axis=1, kind="stable")[:, :5]
    top5 = float((order == labels[:, None]).any(axis=1).mean() * 100.0)
    return EvalSummary(top1, top5, None, len(dataset))


def invariance_rate(params: ClassifierParams, model: VariationModel, dataset: Dataset,
                    samples_per_item: int, rng) -> float:
    """Fraction of (item, delta) pairs whose argmax prediction is unchanged."""
    if samples_per_item < 1:
        raise InputError("samples_per_item must be >= 1")
    base = _predictions(params, dataset.images)
    agree = 0
    for _ in range(samples_per_item):
        deltas = sample_uniform_many(model.space, rng, len(dataset))
        varied = model.apply_batch(dataset.images, deltas)
        agree += int((base == _predictions(params, varied)).sum())
    return agree / (samples_per_item * len(dataset))


def evaluate_with_invariance(params, dataset, model, samples_per_item, rng) -> EvalSummary:
    summary = evaluate(params, dataset)
    summary.invariance = invariance_rate(params, model, dataset, samples_per_item, rng)
    return summary
