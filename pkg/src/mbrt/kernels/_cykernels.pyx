# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot array kernels.

Accumulation orders match mbrt.kernels.numpy_backend exactly, so the two
backends produce bit-identical arrays.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef fused real:
    float
    double


def im2col(real[:, :, :, ::1] xp, int kh, int kw):
    cdef Py_ssize_t n = xp.shape[0], c = xp.shape[1], hp = xp.shape[2], wp = xp.shape[3]
    cdef Py_ssize_t oh = hp - kh + 1, ow = wp - kw + 1
    cdef Py_ssize_t b, ch, i, j, u, v, row
    out_np = np.empty((n, c * kh * kw, oh * ow), dtype=np.asarray(xp).dtype)
    cdef real[:, :, ::1] out = out_np
    with nogil:
        for b in range(n):
            for ch in range(c):
                for i in range(kh):
                    for j in range(kw):
                        row = (ch * kh + i) * kw + j
                        for u in range(oh):
                            for v in range(ow):
                                out[b, row, u * ow + v] = xp[b, ch, u + i, v + j]
    return out_np


def col2im(real[:, :, ::1] cols, int n, int c, int hp, int wp, int kh, int kw):
    cdef Py_ssize_t oh = hp - kh + 1, ow = wp - kw + 1
    cdef Py_ssize_t b, ch, i, j, u, v, row
    xp_np = np.zeros((n, c, hp, wp), dtype=np.asarray(cols).dtype)
    cdef real[:, :, :, ::1] xp = xp_np
    with nogil:
        for b in range(n):
            for ch in range(c):
                for i in range(kh):
                    for j in range(kw):
                        row = (ch * kh + i) * kw + j
                        for u in range(oh):
                            for v in range(ow):
                                xp[b, ch, u + i, v + j] += cols[b, row, u * ow + v]
    return xp_np


def maxpool2_forward(real[:, :, :, ::1] x):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3]
    cdef Py_ssize_t h2 = h // 2, w2 = w // 2
    cdef Py_ssize_t b, ch, u, v, du, dv, best
    cdef real cur, val
    y_np = np.empty((n, c, h2, w2), dtype=np.asarray(x).dtype)
    arg_np = np.empty((n, c, h2, w2), dtype=np.int8)
    cdef real[:, :, :, ::1] y = y_np
    cdef signed char[:, :, :, ::1] arg = arg_np
    with nogil:
        for b in range(n):
            for ch in range(c):
                for u in range(h2):
                    for v in range(w2):
                        best = 0
                        cur = x[b, ch, 2 * u, 2 * v]
                        for du in range(2):
                            for dv in range(2):
                                val = x[b, ch, 2 * u + du, 2 * v + dv]
                                if val > cur:
                                    cur = val
                                    best = du * 2 + dv
                        y[b, ch, u, v] = cur
                        arg[b, ch, u, v] = <signed char> best
    return y_np, arg_np


def maxpool2_backward(real[:, :, :, ::1] dy, signed char[:, :, :, ::1] arg, int h, int w):
    cdef Py_ssize_t n = dy.shape[0], c = dy.shape[1], h2 = dy.shape[2], w2 = dy.shape[3]
    cdef Py_ssize_t b, ch, u, v, du, dv
    dx_np = np.zeros((n, c, h, w), dtype=np.asarray(dy).dtype)
    cdef real[:, :, :, ::1] dx = dx_np
    with nogil:
        for b in range(n):
            for ch in range(c):
                for u in range(h2):
                    for v in range(w2):
                        du = arg[b, ch, u, v] // 2
                        dv = arg[b, ch, u, v] % 2
                        dx[b, ch, 2 * u + du, 2 * v + dv] = dy[b, ch, u, v]
    return dx_np
