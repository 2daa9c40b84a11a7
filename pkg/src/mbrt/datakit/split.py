"""Threshold-based domain splitting by photometric metric.

Bands use strict inequalities exactly as printed in the curation tables;
values falling in the gaps between bands are excluded rather than widening
the bands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.datakit.metrics import METRICS_BATCH
from mbrt.errors import ConfigError


@dataclass(frozen=True)
class Band:
    """Open interval (lo, hi); None means unbounded on that side."""

    name: str
    lo: float | None
    hi: float | None

    def contains(self, value: float) -> bool:
        if self.lo is not None and not value > self.lo:
            return False
        if self.hi is not None and not value < self.hi:
            return False
        return True

    def overlaps(self, other: "Band") -> bool:
        lo1 = -np.inf if self.lo is None else self.lo
        hi1 = np.inf if self.hi is None else self.hi
        lo2 = -np.inf if other.lo is None else other.lo
        hi2 = np.inf if other.hi is None else other.hi
        return max(lo1, lo2) < min(hi1, hi2)


# Published brightness/contrast bands (0-255 scale).
SVHN_BRIGHTNESS = (Band("low", None, 60.0), Band("medium", 160.0, 170.0), Band("high", 180.0, None))
SVHN_CONTRAST = (Band("low", None, 80.0), Band("medium", 90.0, 100.0), Band("high", 190.0, None))
GTSRB_BRIGHTNESS = (Band("low", None, 40.0), Band("medium", 85.0, 125.0), Band("high", 170.0, None))
GTSRB_CONTRAST = (Band("low", None, 80.0), Band("medium", 140.0, 200.0), Band("high", 230.0, None))

BAND_TABLES = {
    ("svhn", "brightness"): SVHN_BRIGHTNESS,
    ("svhn", "contrast"): SVHN_CONTRAST,
    ("gtsrb", "brightness"): GTSRB_BRIGHTNESS,
    ("gtsrb", "contrast"): GTSRB_CONTRAST,
}


@dataclass
class DomainSplit:
    metric: str
    bands: tuple
    subsets: dict  # band name -> Dataset
    excluded: int

    def __getitem__(self, name: str) -> Dataset:
        return self.subsets[name]


def threshold_split(dataset: Dataset, metric: str, bands) -> DomainSplit:
    """Assign each image to the band its metric value falls in."""
    bands = tuple(bands)
    if metric not in METRICS_BATCH:
        raise ConfigError(f"unknown metric {metric!r}; known: {sorted(METRICS_BATCH)}")
    for i, b1 in enumerate(bands):
        for b2 in bands[i + 1 :]:
            if b1.overlaps(b2):
                raise ConfigError(f"bands {b1.name!r} and {b2.name!r} overlap")
    values = METRICS_BATCH[metric](dataset.images)
    subsets = {}
    assigned = np.zeros(len(dataset), dtype=bool)
    for band in bands:
        mask = np.array([band.contains(v) for v in values])
        assigned |= mask
        sub = dataset.subset(np.nonzero(mask)[0])
        sub.domain = f"{dataset.domain or 'data'}/{metric}-{band.name}"
        subsets[band.name] = sub
    return DomainSplit(metric, bands, subsets, int((~assigned).sum()))
