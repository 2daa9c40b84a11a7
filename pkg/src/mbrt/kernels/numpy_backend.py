"""Pure-numpy implementations of the hot array kernels.

These are the fallback used when the compiled extension is unavailable.  Both
backends implement the same contracts and accumulate in the same order, so
results are bit-identical between them (the GEMM itself always runs in numpy).
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def im2col(xp: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Gather kh x kw patches of a padded (N, C, Hp, Wp) array, stride 1.

    Returns (N, C*kh*kw, OH*OW) with OH = Hp-kh+1, OW = Wp-kw+1.
    """
    n, c, hp, wp = xp.shape
    oh, ow = hp - kh + 1, wp - kw + 1
    # windows: (N, C, OH, OW, kh, kw) -> (N, C, kh, kw, OH, OW)
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    cols = np.ascontiguousarray(win.transpose(0, 1, 4, 5, 2, 3))
    return cols.reshape(n, c * kh * kw, oh * ow)


def col2im(cols: np.ndarray, n: int, c: int, hp: int, wp: int, kh: int, kw: int) -> np.ndarray:
    """Scatter-add patch columns back onto a padded (N, C, Hp, Wp) array."""
    oh, ow = hp - kh + 1, wp - kw + 1
    xp = np.zeros((n, c, hp, wp), dtype=cols.dtype)
    cols6 = cols.reshape(n, c, kh, kw, oh, ow)
    for i in range(kh):
        for j in range(kw):
            xp[:, :, i : i + oh, j : j + ow] += cols6[:, :, i, j]
    return xp


def maxpool2_forward(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2 stride-2 max pooling of (N, C, H, W); H and W must be even.

    Returns (y, arg) where arg in {0,1,2,3} indexes the window position
    (row-major); ties resolve to the first position, deterministically.
    """
    n, c, h, w = x.shape
    win = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    flat = win.reshape(n, c, h // 2, w // 2, 4)
    arg = flat.argmax(axis=-1).astype(np.int8)
    y = np.take_along_axis(flat, arg[..., None].astype(np.intp), axis=-1)[..., 0]
    return y, arg


def maxpool2_backward(dy: np.ndarray, arg: np.ndarray, h: int, w: int) -> np.ndarray:
    """Scatter upstream pool gradients to the winning window positions."""
    n, c, h2, w2 = dy.shape
    flat = np.zeros((n, c, h2, w2, 4), dtype=dy.dtype)
    np.put_along_axis(flat, arg[..., None].astype(np.intp), dy[..., None], axis=-1)
    win = flat.reshape(n, c, h2, w2, 2, 2).transpose(0, 1, 2, 4, 3, 5)
    return win.reshape(n, c, h, w)
