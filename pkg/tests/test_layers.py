import numpy as np
import pytest

from mbrt.diffcore import layers as L
from mbrt.diffcore.fdcheck import probe_gradient
from mbrt.errors import InputError
from tests.conftest import naive_conv2d


def scalar(f, u):
    """Reduce a layer output to a scalar with fixed weights u."""
    return lambda out: float((u * out).sum())


def test_conv_forward_matches_naive(rng):
    x = rng.standard_normal((2, 3, 5, 6))
    w = rng.standard_normal((4, 3, 3, 3))
    b = rng.standard_normal(4)
    y, _ = L.conv2d_forward(x, w, b, 1)
    assert np.allclose(y, naive_conv2d(x, w, b, 1), atol=1e-12)


def test_conv_backward_finite_difference(rng):
    x = rng.standard_normal((2, 3, 6, 6))
    w = rng.standard_normal((4, 3, 3, 3)) * 0.4
    b = rng.standard_normal(4) * 0.1
    u = rng.standard_normal((2, 4, 6, 6))
    y, cache = L.conv2d_forward(x, w, b, 1)
    dx, dw, db = L.conv2d_backward(u, cache)
    probe_gradient(lambda wv: float((u * L.conv2d_forward(x, wv, b, 1)[0]).sum()), w, dw, rng, 60)
    probe_gradient(lambda xv: float((u * L.conv2d_forward(xv, w, b, 1)[0]).sum()), x, dx, rng, 60)
    probe_gradient(lambda bv: float((u * L.conv2d_forward(x, w, bv, 1)[0]).sum()), b, db, rng, 4)


def test_fc_backward_finite_difference(rng):
    x = rng.standard_normal((5, 7))
    w = rng.standard_normal((7, 3))
    b = rng.standard_normal(3)
    u = rng.standard_normal((5, 3))
    _, cache = L.fc_forward(x, w, b)
    dx, dw, db = L.fc_backward(u, cache)
    probe_gradient(lambda wv: float((u * L.fc_forward(x, wv, b)[0]).sum()), w, dw, rng, 21)
    probe_gradient(lambda xv: float((u * L.fc_forward(xv, w, b)[0]).sum()), x, dx, rng, 35)


def test_maxpool_backward_finite_difference(rng):
    x = rng.standard_normal((2, 3, 6, 6))
    u = rng.standard_normal((2, 3, 3, 3))
    _, cache = L.maxpool2_forward(x)
    dx = L.maxpool2_backward(u, cache)
    probe_gradient(lambda xv: float((u * L.maxpool2_forward(xv)[0]).sum()), x, dx, rng, 60)


def test_maxpool_rejects_odd_dims(rng):
    with pytest.raises(InputError):
        L.maxpool2_forward(rng.standard_normal((1, 1, 5, 6)))


def test_sigmoid_and_global_mean_gradients(rng):
    x = rng.standard_normal((3, 4, 4, 4))
    u = rng.standard_normal((3, 4, 4, 4))
    y, cache = L.sigmoid_forward(x)
    assert y.min() > 0 and y.max() < 1
    dx = L.sigmoid_backward(u, cache)
    probe_gradient(lambda xv: float((u * L.sigmoid_forward(xv)[0]).sum()), x, dx, rng, 50)
    ug = rng.standard_normal((3, 4))
    g, gc = L.global_mean_forward(x)
    dxg = L.global_mean_backward(ug, gc)
    probe_gradient(lambda xv: float((ug * L.global_mean_forward(xv)[0]).sum()), x, dxg, rng, 50)


def test_sigmoid_tails_are_finite():
    y, _ = L.sigmoid_forward(np.array([-1e4, -50.0, 0.0, 50.0, 1e4]))
    assert np.isfinite(y).all() and y[0] == 0.0 and y[-1] == 1.0 and y[2] == 0.5


def test_concat_broadcast_roundtrip(rng):
    content = rng.standard_normal((2, 5, 4, 4))
    style = rng.standard_normal((2, 3))
    z, cache = L.concat_broadcast_forward(content, style)
    assert z.shape == (2, 8, 4, 4)
    assert np.array_equal(z[:, :5], content)
    assert np.array_equal(z[0, 5], np.full((4, 4), style[0, 0]))
    u = rng.standard_normal(z.shape)
    dc, ds = L.concat_broadcast_backward(u, cache)
    assert np.array_equal(dc, u[:, :5])
    assert np.allclose(ds, u[:, 5:].sum(axis=(2, 3)))


def test_dropout_train_eval_semantics(rng):
    x = np.ones((4, 10))
    y, cache = L.dropout_forward(x, 0.5, np.random.default_rng(0))
    kept = y != 0
    assert np.allclose(y[kept], 2.0)  # inverted scaling by 1/(1-rate)
    assert L.dropout_backward(np.ones_like(y), cache)[~kept].sum() == 0
    y_eval, cache_eval = L.dropout_forward(x, 0.0, None)
    assert np.array_equal(y_eval, x) and cache_eval is None


def test_dropout_mask_is_seeded():
    x = np.ones((8, 8))
    a, _ = L.dropout_forward(x, 0.3, np.random.default_rng(7))
    b, _ = L.dropout_forward(x, 0.3, np.random.default_rng(7))
    assert np.array_equal(a, b)
