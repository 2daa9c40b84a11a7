import numpy as np
import pytest

from mbrt import kernels
from mbrt.kernels import numpy_backend


@pytest.mark.parametrize("dtype", [np.float64, np.float32])
def test_backends_bit_identical(rng, dtype):
    x = rng.standard_normal((3, 4, 9, 11)).astype(dtype)
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1))))
    a = kernels.im2col(xp, 3, 3)
    b = numpy_backend.im2col(xp, 3, 3)
    assert np.array_equal(a, b)
    cols = np.ascontiguousarray(rng.standard_normal(a.shape).astype(dtype))
    assert np.array_equal(kernels.col2im(cols, *xp.shape, 3, 3),
                          numpy_backend.col2im(cols, *xp.shape, 3, 3))
    even = np.ascontiguousarray(x[:, :, :8, :10])
    y1, g1 = kernels.maxpool2_forward(even)
    y2, g2 = numpy_backend.maxpool2_forward(even)
    assert np.array_equal(y1, y2) and np.array_equal(g1, g2)
    dy = np.ascontiguousarray(rng.standard_normal(y1.shape).astype(dtype))
    assert np.array_equal(kernels.maxpool2_backward(dy, g1, 8, 10),
                          numpy_backend.maxpool2_backward(dy, g2, 8, 10))


def test_im2col_matches_patch_extraction(rng):
    xp = rng.standard_normal((2, 3, 6, 7))
    cols = numpy_backend.im2col(np.ascontiguousarray(xp), 3, 3)
    n, c, hp, wp = xp.shape
    for u in range(hp - 2):
        for v in range(wp - 2):
            patch = xp[:, :, u : u + 3, v : v + 3].reshape(n, -1)
            assert np.array_equal(cols[:, :, u * (wp - 2) + v], patch)


def test_col2im_is_im2col_adjoint(rng):
    # <im2col(x), c> == <x, col2im(c)> for random x, c
    xp = np.ascontiguousarray(rng.standard_normal((2, 3, 6, 6)))
    cols = np.ascontiguousarray(rng.standard_normal((2, 27, 16)))
    lhs = (numpy_backend.im2col(xp, 3, 3) * cols).sum()
    rhs = (xp * numpy_backend.col2im(cols, 2, 3, 6, 6, 3, 3)).sum()
    assert np.isclose(lhs, rhs, rtol=1e-12)


def test_maxpool_tie_break_is_first_position():
    x = np.zeros((1, 1, 2, 2))
    _, arg = kernels.maxpool2_forward(np.ascontiguousarray(x))
    assert arg[0, 0, 0, 0] == 0  # all-equal window resolves to position 0


def test_backend_name_reports():
    assert kernels.backend_name() in ("cython", "numpy")
