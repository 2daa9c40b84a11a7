"""Synthetic image generators for the desk-scale experiments.

Two families:

* ``render_digits`` -- ten 5x7 glyph classes placed on a pure-black background
  with jittered position, integer scale, and stroke intensity.  The black
  background is what the known background-color model detects, so these are
  the raw material for colorized-domain experiments.

* ``make_shape_domains`` -- tiny two-color shape images in two palettes
  (domain A dark-background, domain B bright-background), the unpaired pair
  used to fit translation models and probe model quality.
"""

from __future__ import annotations

import numpy as np

from mbrt.datakit.dataset import Dataset
from mbrt.errors import InputError
from mbrt.seeding import substream

# Rows of 5-bit glyph masks for digits 0-9.
_DIGIT_FONT = [
    ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
    ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
    ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
    ["11111", "00010", "00100", "00010", "00001", "10001", "01110"],
    ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
    ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],
    ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
    ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
    ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
    ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
]

_GLYPHS = np.array([[[int(b) for b in row] for row in glyph] for glyph in _DIGIT_FONT], dtype=float)


def render_digits(n: int, seed: int, size: int = 28, num_classes: int = 10,
                  domain: str = "digits") -> Dataset:
    """n random digit images (3, size, size) on exactly-black backgrounds."""
    if not 2 <= num_classes <= 10:
        raise InputError("num_classes must be between 2 and 10")
    if size < 16:
        raise InputError("digit canvas must be at least 16 pixels")
    max_scale = 3 if size >= 26 else 2
    rng = substream(seed, "digits", n, size)
    images = np.zeros((n, 3, size, size))
    labels = rng.integers(0, num_classes, size=n)
    for i in range(n):
        glyph = _GLYPHS[labels[i]]
        scale = int(rng.integers(2, max_scale + 1))  # glyph becomes 5s x 7s
        block = np.kron(glyph, np.ones((scale, scale)))
        gh, gw = block.shape
        top = int(rng.integers(1, size - gh))
        left = int(rng.integers(1, size - gw))
        intensity = rng.uniform(0.7, 1.0)
        jitter = rng.uniform(-0.06, 0.06, size=block.shape)
        stroke = np.clip(block * (intensity + jitter), 0.0, 1.0) * (block > 0)
        images[i, :, top : top + gh, left : left + gw] = stroke[None]
    return Dataset(images, labels, provenance=f"synth-digits(seed={seed})", domain=domain)


_SHAPE_CLASSES = 4


def _draw_shape(canvas: np.ndarray, label: int, rng) -> None:
    """Set foreground pixels of an (S, S) mask for one of four shape classes."""
    s = canvas.shape[0]
    c = s // 2 + int(rng.integers(-1, 2))
    if label == 0:  # horizontal bar
        canvas[c - 1 : c + 1, 1 : s - 1] = 1.0
    elif label == 1:  # vertical bar
        canvas[1 : s - 1, c - 1 : c + 1] = 1.0
    elif label == 2:  # plus
        canvas[c - 1 : c + 1, 1 : s - 1] = 1.0
        canvas[1 : s - 1, c - 1 : c + 1] = 1.0
    else:  # solid block
        half = s // 4
        canvas[c - half : c + half, c - half : c + half] = 1.0


_PALETTES = {
    # Domain B shifts the foreground hue toward pink on the shared dark
    # background; the red channel's foreground/background contrast is common
    # to both domains, so the gap is a color shift, not a structural one.
    "a": {"bg": (0.06, 0.06, 0.10), "fg": (0.90, 0.85, 0.15),
          "fg_jitter": (0.04, 0.04, 0.04), "bg_jitter": (0.04, 0.04, 0.04)},
    "b": {"bg": (0.06, 0.06, 0.10), "fg": (0.85, 0.40, 0.55),
          "fg_jitter": (0.04, 0.04, 0.04), "bg_jitter": (0.04, 0.04, 0.04)},
}


def render_shapes(n: int, seed: int, palette: str, size: int = 8,
                  domain: str = "") -> Dataset:
    """n two-color shape images in the given palette ('a' or 'b')."""
    if palette not in _PALETTES:
        raise InputError(f"palette must be 'a' or 'b', got {palette!r}")
    pal = _PALETTES[palette]
    fg_jit = np.asarray(pal["fg_jitter"])
    bg_jit = np.asarray(pal["bg_jitter"])
    rng = substream(seed, "shapes", palette, n, size)
    images = np.empty((n, 3, size, size))
    labels = rng.integers(0, _SHAPE_CLASSES, size=n)
    for i in range(n):
        mask = np.zeros((size, size))
        _draw_shape(mask, int(labels[i]), rng)
        bg = np.clip(np.asarray(pal["bg"]) + rng.uniform(-bg_jit, bg_jit), 0, 1)
        fg = np.clip(np.asarray(pal["fg"]) + rng.uniform(-fg_jit, fg_jit), 0, 1)
        images[i] = bg[:, None, None] * (1 - mask) + fg[:, None, None] * mask
    return Dataset(images, labels, provenance=f"synth-shapes(seed={seed},palette={palette})",
                   domain=domain or f"shapes-{palette}")


def make_shape_domains(n: int, seed: int, size: int = 8):
    """(domain A, domain B) labeled shape datasets in the two palettes."""
    return (render_shapes(n, seed, "a", size), render_shapes(n, seed + 1, "b", size))
