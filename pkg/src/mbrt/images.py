"""Image conventions shared across the toolkit.

An image is a (C, H, W) float array with pixels in the canonical [0, 1]
range; 0-255 sources are rescaled on ingestion.  Batches stack images along a
leading axis.
"""

from __future__ import annotations

import numpy as np

from mbrt.errors import InputError

PIXEL_LO = 0.0
PIXEL_HI = 1.0


def validate_image(x: np.ndarray, channels: int | None = None) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 3:
        raise InputError(f"image must be (C, H, W), got shape {x.shape}")
    if channels is not None and x.shape[0] != channels:
        raise InputError(f"expected {channels}-channel image, got {x.shape[0]}")
    if not np.isfinite(x).all():
        raise InputError("image contains non-finite pixels")
    if x.min() < PIXEL_LO - 1e-12 or x.max() > PIXEL_HI + 1e-12:
        raise InputError(f"pixels outside [{PIXEL_LO}, {PIXEL_HI}]: range [{x.min()}, {x.max()}]")
    return x


def clip01(x: np.ndarray) -> np.ndarray:
    return np.clip(x, PIXEL_LO, PIXEL_HI)
