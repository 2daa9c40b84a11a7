import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbrt.diffcore.loss import grad_logits_ce, loss_ce, softmax
from mbrt.errors import InputError


def test_uniform_logits_give_log_k():
    logits = np.zeros((6, 10))
    mean, per = loss_ce(logits, np.arange(6))
    assert np.allclose(per, math.log(10), atol=1e-12)
    assert np.isclose(mean, math.log(10))


def test_dominant_correct_logit_drives_loss_to_zero():
    logits = np.zeros((1, 4))
    logits[0, 2] = 200.0
    _, per = loss_ce(logits, [2])
    assert per[0] >= 0 and per[0] < 1e-12


def test_fixed_matrix_against_manual_softmax_nll():
    logits = np.array([[0.2, -1.0, 0.7, 0.0],
                       [2.0, 2.0, -3.0, 0.5],
                       [-0.5, 0.1, 0.1, 0.4]])
    labels = np.array([2, 0, 3])
    # independent scalar computation
    expected = []
    for row, y in zip(logits, labels):
        z = sum(math.exp(v) for v in row)
        expected.append(-math.log(math.exp(row[y]) / z))
    mean, per = loss_ce(logits, labels)
    assert np.allclose(per, expected, rtol=1e-12)
    assert np.isclose(mean, np.mean(expected), rtol=1e-12)


def test_mean_equals_average_of_per_example(rng):
    logits = rng.standard_normal((13, 7))
    labels = rng.integers(0, 7, 13)
    mean, per = loss_ce(logits, labels)
    assert np.isclose(mean, per.mean(), rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.integers(1, 12), st.integers(0, 10**6))
def test_loss_nonnegative(k, n, seed):
    rng = np.random.default_rng(seed)
    logits = rng.standard_normal((n, k)) * 10
    labels = rng.integers(0, k, n)
    _, per = loss_ce(logits, labels)
    assert (per >= 0).all()


def test_label_out_of_range_rejected():
    with pytest.raises(InputError):
        loss_ce(np.zeros((2, 3)), [0, 3])
    with pytest.raises(InputError):
        loss_ce(np.zeros((2, 3)), [0])


def test_grad_logits_is_softmax_minus_onehot(rng):
    logits = rng.standard_normal((4, 5))
    labels = rng.integers(0, 5, 4)
    g = grad_logits_ce(logits, labels, np.ones(4))
    expected = softmax(logits)
    expected[np.arange(4), labels] -= 1
    assert np.allclose(g, expected)
