"""Cross-entropy loss over logits, with per-example values."""

from __future__ import annotations

import numpy as np

from mbrt.errors import InputError, NumericalError


def _check_labels(logits, labels):
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    if logits.ndim != 2:
        raise InputError(f"logits must be (n, k), got shape {logits.shape}")
    if labels.shape != (logits.shape[0],):
        raise InputError(f"{logits.shape[0]} logit rows but {labels.shape} labels")
    if labels.size and (labels.min() < 0 or labels.max() >= logits.shape[1]):
        raise InputError(f"labels outside [0, {logits.shape[1] - 1}]")
    return logits, labels


def loss_ce(logits, labels):
    """Mean and per-example softmax cross-entropy.

    per_example[i] = logsumexp(logits[i]) - logits[i, labels[i]] >= 0.
    """
    logits, labels = _check_labels(logits, labels)
    m = logits.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(logits - m).sum(axis=1))
    per_example = lse - logits[np.arange(len(labels)), labels]
    if not np.isfinite(per_example).all():
        raise NumericalError("non-finite cross-entropy loss")
    return float(per_example.mean()), per_example


def softmax(logits):
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    return e / e.sum(axis=1, keepdims=True)


def grad_logits_ce(logits, labels, example_weights=None):
    """Gradient of sum_i weight_i * ce_i with respect to the logits.

    With example_weights = 1/n this is the gradient of the batch mean.
    """
    logits, labels = _check_labels(logits, labels)
    g = softmax(logits)
    g[np.arange(len(labels)), labels] -= 1.0
    if example_weights is not None:
        g *= np.asarray(example_weights, dtype=g.dtype)[:, None]
    return g
