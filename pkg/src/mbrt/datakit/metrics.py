"""Photometric curation metrics, reported on the 0-255 scale.

Brightness is the mean pixel value over all channels jointly; contrast is the
difference between the largest and smallest entries.  Values stay on the
0-255 scale so the published threshold tables apply verbatim, even though
pixels are stored in [0, 1].
"""

from __future__ import annotations

import numpy as np


def brightness_metric(x) -> float:
    return float(np.asarray(x).mean() * 255.0)


def contrast_metric(x) -> float:
    x = np.asarray(x)
    return float((x.max() - x.min()) * 255.0)


def brightness_metric_batch(images) -> np.ndarray:
    images = np.asarray(images)
    return images.reshape(len(images), -1).mean(axis=1) * 255.0


def contrast_metric_batch(images) -> np.ndarray:
    images = np.asarray(images)
    flat = images.reshape(len(images), -1)
    return (flat.max(axis=1) - flat.min(axis=1)) * 255.0


METRICS = {"brightness": brightness_metric, "contrast": contrast_metric}
METRICS_BATCH = {"brightness": brightness_metric_batch, "contrast": contrast_metric_batch}
