"""Labeled image datasets and their on-disk form (IDX pair + text manifest)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from mbrt.datakit.idx import read_idx, write_idx
from mbrt.datakit.metrics import brightness_metric_batch, contrast_metric_batch
from mbrt.errors import FormatError, InputError


@dataclass
class Dataset:
    """Images (N, 3, H, W) in [0, 1] with optional integer labels."""

    images: np.ndarray
    labels: np.ndarray | None = None
    provenance: str = ""
    domain: str = ""

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=float)
        if self.images.ndim != 4:
            raise InputError(f"dataset images must be (N, C, H, W), got {self.images.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (len(self.images),):
                raise InputError("label count does not match image count")

    def __len__(self):
        return len(self.images)

    def subset(self, idx) -> "Dataset":
        labels = None if self.labels is None else self.labels[idx]
        return replace(self, images=self.images[idx], labels=labels)

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise InputError(f"dataset {self.provenance or self.domain!r} is unlabeled")
        return self.labels


def to_three_channels(images: np.ndarray) -> np.ndarray:
    """Grayscale (N, H, W) stacks become (N, 3, H, W) by channel repetition."""
    if images.ndim == 3:
        return np.repeat(images[:, None], 3, axis=1)
    return images


def load_idx(image_file, label_file=None, domain: str = "") -> Dataset:
    """Ingest an IDX image stack (and optional labels) into a Dataset.

    Pixels are rescaled from 0-255 to [0, 1]; grayscale inputs are repeated
    to three channels.
    """
    raw = read_idx(image_file)
    if raw.ndim not in (3, 4):
        raise FormatError(f"image IDX must be 3-d or 4-d, got {raw.ndim}-d")
    if raw.ndim == 4 and raw.shape[1] != 3:
        raise FormatError(f"4-d image IDX must have 3 channels, got {raw.shape[1]}")
    images = to_three_channels(raw.astype(float) / 255.0)
    labels = None
    if label_file is not None:
        labels = read_idx(label_file)
        if labels.ndim != 1:
            raise FormatError(f"label IDX must be 1-d, got {labels.ndim}-d")
        if len(labels) != len(images):
            raise FormatError(f"{len(images)} images but {len(labels)} labels")
        labels = labels.astype(int)
    return Dataset(images, labels, provenance=str(image_file), domain=domain)


def quantize(images: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(images) * 255.0), 0, 255).astype(np.uint8)


def save_dataset(directory, name: str, dataset: Dataset) -> str:
    """Write {name}-images.idx / {name}-labels.idx plus a manifest; returns
    the manifest path.  Manifest rows are (index, label, domain, brightness,
    contrast) in dataset order."""
    os.makedirs(directory, exist_ok=True)
    img_name, lab_name = f"{name}-images.idx", f"{name}-labels.idx"
    write_idx(os.path.join(directory, img_name), quantize(dataset.images))
    if dataset.labels is not None:
        write_idx(os.path.join(directory, lab_name), dataset.labels.astype(np.uint8))
    bright = brightness_metric_batch(dataset.images)
    contrast = contrast_metric_batch(dataset.images)
    manifest = os.path.join(directory, f"{name}.manifest")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write(f"# images = {img_name}\n")
        fh.write(f"# labels = {lab_name if dataset.labels is not None else '-'}\n")
        fh.write(f"# provenance = {dataset.provenance}\n")
        for i in range(len(dataset)):
            label = dataset.labels[i] if dataset.labels is not None else -1
            fh.write(f"{i}\t{label}\t{dataset.domain}\t{bright[i]:.6f}\t{contrast[i]:.6f}\n")
    return manifest


def load_dataset(manifest_path) -> Dataset:
    base = os.path.dirname(os.path.abspath(manifest_path))
    header = {}
    domain = ""
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key.strip()] = value.strip()
            elif line.strip():
                domain = line.split("\t")[2]
    if "images" not in header:
        raise FormatError(f"manifest {manifest_path} missing '# images =' header")
    labels = header.get("labels", "-")
    ds = load_idx(
        os.path.join(base, header["images"]),
        None if labels in ("-", "") else os.path.join(base, labels),
        domain=domain,
    )
    ds.provenance = header.get("provenance", ds.provenance)
    return ds
