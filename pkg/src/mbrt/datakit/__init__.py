"""Dataset ingestion, photometric metrics, and domain curation."""

from mbrt.datakit.colorize import colorize_background, rgb_to_delta
from mbrt.datakit.composed import build_composed_testset
from mbrt.datakit.dataset import Dataset, load_dataset, load_idx, save_dataset
from mbrt.datakit.idx import read_idx, write_idx
from mbrt.datakit.metrics import (
    brightness_metric,
    brightness_metric_batch,
    contrast_metric,
    contrast_metric_batch,
)
from mbrt.datakit.split import (
    BAND_TABLES,
    GTSRB_BRIGHTNESS,
    GTSRB_CONTRAST,
    SVHN_BRIGHTNESS,
    SVHN_CONTRAST,
    Band,
    DomainSplit,
    threshold_split,
)
from mbrt.datakit.synth import make_shape_domains, render_digits, render_shapes

__all__ = [
    "BAND_TABLES",
    "Band",
    "Dataset",
    "DomainSplit",
    "GTSRB_BRIGHTNESS",
    "GTSRB_CONTRAST",
    "SVHN_BRIGHTNESS",
    "SVHN_CONTRAST",
    "brightness_metric",
    "brightness_metric_batch",
    "build_composed_testset",
    "colorize_background",
    "contrast_metric",
    "contrast_metric_batch",
    "load_dataset",
    "load_idx",
    "make_shape_domains",
    "read_idx",
    "render_digits",
    "render_shapes",
    "rgb_to_delta",
    "save_dataset",
    "threshold_split",
    "write_idx",
]
