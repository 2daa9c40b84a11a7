"""Functional layer primitives with explicit forward/backward passes.

Each forward returns (output, cache); the matching backward consumes the
upstream gradient and the cache and returns gradients for every input.  No
computation graph is built; callers compose passes by hand.
"""

from __future__ import annotations

import numpy as np

from mbrt import kernels
from mbrt.errors import InputError


def conv2d_forward(x, w, b, pad):
    """3x3-style convolution, stride 1, symmetric zero padding `pad`.

    x: (N, C, H, W); w: (F, C, kh, kw); b: (F,).  Output (N, F, OH, OW) with
    OH = H + 2*pad - kh + 1.  Runs as im2col + GEMM; the patch ops come from
    the selected kernel backend.
    """
    n, c, h, wd = x.shape
    f, c2, kh, kw = w.shape
    if c != c2:
        raise InputError(f"conv input has {c} channels, weights expect {c2}")
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))))
    cols = kernels.im2col(xp, kh, kw)
    w2 = w.reshape(f, c * kh * kw)
    y = np.matmul(w2, cols)  # (N, F, L)
    oh, ow = h + 2 * pad - kh + 1, wd + 2 * pad - kw + 1
    y = y.reshape(n, f, oh, ow) + b[None, :, None, None]
    cache = (cols, w, x.shape, pad)
    return y, cache


def conv2d_backward(dy, cache):
    cols, w, x_shape, pad = cache
    n, c, h, wd = x_shape
    f, _, kh, kw = w.shape
    l = dy.shape[2] * dy.shape[3]
    dyr = np.ascontiguousarray(dy).reshape(n, f, l)
    db = dyr.sum(axis=(0, 2))
    w2 = w.reshape(f, c * kh * kw)
    dw = np.matmul(dyr, cols.transpose(0, 2, 1)).sum(axis=0).reshape(w.shape)
    dcols = np.ascontiguousarray(np.matmul(w2.T, dyr))
    dxp = kernels.col2im(dcols, n, c, h + 2 * pad, wd + 2 * pad, kh, kw)
    dx = dxp[:, :, pad : pad + h, pad : pad + wd] if pad else dxp
    return dx, dw, db


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dy, mask):
    return dy * mask


def maxpool2_forward(x):
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise InputError(f"maxpool2 needs even spatial dims, got {h}x{w}")
    y, arg = kernels.maxpool2_forward(np.ascontiguousarray(x))
    return y, (arg, h, w)


def maxpool2_backward(dy, cache):
    arg, h, w = cache
    return kernels.maxpool2_backward(np.ascontiguousarray(dy), arg, h, w)


def fc_forward(x, w, b):
    """x: (N, D); w: (D, M); b: (M,)."""
    return x @ w + b, (x, w)


def fc_backward(dy, cache):
    x, w = cache
    return dy @ w.T, x.T @ dy, dy.sum(axis=0)


def dropout_forward(x, rate, rng):
    """Inverted dropout with a seeded mask; identity when rate == 0."""
    if rate <= 0.0:
        return x, None
    keep = rng.random(x.shape) >= rate
    scale = x.dtype.type(1.0 / (1.0 - rate))
    return x * keep * scale, (keep, scale)


def dropout_backward(dy, cache):
    if cache is None:
        return dy
    keep, scale = cache
    return dy * keep * scale


def sigmoid_forward(x):
    # stable in both tails: never exponentiates a positive argument
    y = np.empty_like(x)
    pos = x >= 0
    y[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    y[~pos] = ex / (1.0 + ex)
    return y, y


def sigmoid_backward(dy, y):
    return dy * y * (1.0 - y)


def global_mean_forward(x):
    """Spatial mean of (N, C, H, W) -> (N, C)."""
    n, c, h, w = x.shape
    return x.mean(axis=(2, 3)), (n, c, h, w)


def global_mean_backward(dy, cache):
    n, c, h, w = cache
    return np.broadcast_to(dy[:, :, None, None] / (h * w), (n, c, h, w)).astype(dy.dtype, copy=True)


def concat_broadcast_forward(content, style):
    """Append a style vector to a content map as constant channels.

    content: (N, Cc, H, W); style: (N, S) -> output (N, Cc+S, H, W).
    """
    n, cc, h, w = content.shape
    s = style.shape[1]
    tiled = np.broadcast_to(style[:, :, None, None], (n, s, h, w))
    return np.concatenate([content, tiled], axis=1), (cc, s)


def concat_broadcast_backward(dy, cache):
    cc, s = cache
    dcontent = dy[:, :cc]
    dstyle = dy[:, cc:].sum(axis=(2, 3))
    return dcontent, dstyle
