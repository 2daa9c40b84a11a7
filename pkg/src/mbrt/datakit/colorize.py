"""Background colorization: build colored-background domains from dark-background data."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.errors import InputError
from mbrt.variation.models import BackgroundColorModel


def rgb_to_delta(rgb) -> np.ndarray:
    """An RGB triple on the 0-255 scale as a background-color nuisance vector."""
    rgb = np.asarray(rgb, dtype=float)
    if rgb.shape != (3,) or rgb.min() < 0 or rgb.max() > 255:
        raise InputError(f"expected an RGB triple in [0, 255], got {rgb}")
    return rgb / 255.0 * 2.0 - 1.0


def colorize_background(dataset: Dataset, color, mask_mode: str = "all",
                        domain: str | None = None) -> Dataset:
    """Apply the background-color model with a fixed color per item.

    `color` is one RGB triple (0-255) or an (N, 3) array of per-item triples.
    Labels and item order are preserved.
    """
    model = BackgroundColorModel(mask_mode=mask_mode)
    color = np.asarray(color, dtype=float)
    if color.ndim == 1:
        deltas = np.tile(rgb_to_delta(color), (len(dataset), 1))
    else:
        if color.shape != (len(dataset), 3):
            raise InputError(f"per-item colors must be ({len(dataset)}, 3), got {color.shape}")
        deltas = np.stack([rgb_to_delta(c) for c in color])
    images = model.apply_batch(dataset.images, deltas)
    tag = domain if domain is not None else f"{dataset.domain or 'data'}/bg-colorized"
    return replace(dataset, images=images, domain=tag,
                   provenance=f"{dataset.provenance}+bgcolor")
