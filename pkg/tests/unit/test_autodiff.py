#!/usr/bin/env python3
"""Test the tensor engine: forward values, finite-difference gradients and Adam."""

import numpy as np
import pytest

from nerf_stego.autodiff import (
    Adam,
    AdamState,
    Tensor,
    adam_step,
    affine,
    concat,
    conv2d,
    cumsum,
    div,
    exp,
    float64_mode,
    matmul,
    maxpool2d,
    mean,
    mse_loss,
    no_grad,
    relu,
    reshape,
    sigmoid,
)
from nerf_stego.autodiff import sum as tsum
from nerf_stego.errors import DimensionError, NumericError, UsageError


def numeric_grads(fn, arrays, h=1e-6):
    """Central differences of a scalar function of several arrays."""
    grads = []
    for i, base in enumerate(arrays):
        grad = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            shifted = [a.copy() for a in arrays]
            shifted[i][idx] = base[idx] + h
            plus = fn(*[Tensor(a) for a in shifted]).item()
            shifted[i][idx] = base[idx] - h
            minus = fn(*[Tensor(a) for a in shifted]).item()
            grad[idx] = (plus - minus) / (2 * h)
        grads.append(grad)
    return grads


def check_grads(fn, *arrays):
    with float64_mode():
        params = [Tensor(a, requires_grad=True) for a in arrays]
        fn(*params).backward()
        expected = numeric_grads(fn, [np.asarray(a, dtype=np.float64) for a in arrays])
    for p, g in zip(params, expected):
        np.testing.assert_allclose(p.grad, g, rtol=1e-5, atol=1e-7)


def away_from_zero(rng, shape):
    """Random values with |x| >= 0.1 so relu kinks stay out of reach."""
    x = rng.uniform(0.1, 1.0, size=shape)
    return x * rng.choice([-1.0, 1.0], size=shape)


# Forward values


def test_conv2d_identity_scaling():
    x = Tensor(np.ones((1, 3, 3)))
    out = conv2d(x, Tensor(np.full((1, 1, 1, 1), 2.0)), Tensor(np.zeros(1)))
    np.testing.assert_array_equal(out.numpy(), np.full((1, 3, 3), 2.0))


def test_conv2d_matches_loop_oracle(rng):
    x = rng.normal(size=(2, 6, 6))
    k = rng.normal(size=(3, 2, 3, 3))
    b = rng.normal(size=3)
    with float64_mode():
        out = conv2d(Tensor(x), Tensor(k), Tensor(b)).numpy()
    expected = np.zeros((3, 4, 4))
    for o in range(3):
        for r in range(4):
            for c in range(4):
                expected[o, r, c] = np.sum(k[o] * x[:, r:r + 3, c:c + 3]) + b[o]
    np.testing.assert_allclose(out, expected, atol=1e-6)


def test_conv2d_stride_and_padding_shapes():
    for h in range(3, 12):
        for k in (1, 3, 5):
            for stride in (1, 2, 3):
                for padding in (0, 1, 2):
                    if h + 2 * padding < k:
                        continue
                    x = Tensor(np.zeros((1, h, h)))
                    out = conv2d(x, Tensor(np.zeros((2, 1, k, k))), Tensor(np.zeros(2)),
                                 stride=stride, padding=padding)
                    size = (h + 2 * padding - k) // stride + 1
                    assert out.shape == (2, size, size)


def test_conv2d_channel_mismatch():
    with pytest.raises(DimensionError):
        conv2d(Tensor(np.zeros((2, 5, 5))), Tensor(np.zeros((1, 3, 3, 3))), Tensor(np.zeros(1)))


def test_conv2d_full_scale_shape():
    x = Tensor(np.zeros((3, 180, 180)))
    out = conv2d(x, Tensor(np.zeros((64, 3, 5, 5))), Tensor(np.zeros(64)))
    assert out.shape == (64, 176, 176)
    assert maxpool2d(out, 9, 9).shape == (64, 19, 19)


def test_maxpool_values():
    x = Tensor(np.arange(1, 17, dtype=float).reshape(1, 4, 4))
    np.testing.assert_array_equal(maxpool2d(x, 2, 2).numpy(), [[[6, 8], [14, 16]]])


def test_maxpool_ties_route_to_one_element():
    x = Tensor(np.ones((1, 6, 6)), requires_grad=True)
    tsum(maxpool2d(x, 3, 3)).backward()
    for r in range(2):
        for c in range(2):
            window = x.grad[0, 3 * r:3 * r + 3, 3 * c:3 * c + 3]
            assert np.count_nonzero(window) == 1
            assert window[0, 0] == 1.0


def test_maxpool_window_too_large():
    with pytest.raises(DimensionError):
        maxpool2d(Tensor(np.zeros((1, 2, 2))), 3, 1)


def test_affine_examples(rng):
    out = affine(Tensor([1.0, 2.0, 3.0]), Tensor(np.eye(3)), Tensor(np.zeros(3)))
    np.testing.assert_array_equal(out.numpy(), [1, 2, 3])
    out = affine(Tensor([7.0, -1.0]), Tensor(np.zeros((2, 2))), Tensor([5.0, 5.0]))
    np.testing.assert_array_equal(out.numpy(), [5, 5])

    w, x, b = rng.normal(size=(4, 6)), rng.normal(size=6), rng.normal(size=4)
    with float64_mode():
        got = affine(Tensor(x), Tensor(w), Tensor(b)).numpy()
    expected = [sum(w[i, j] * x[j] for j in range(6)) + b[i] for i in range(4)]
    np.testing.assert_allclose(got, expected, atol=1e-6)


def test_affine_shape_mismatch():
    with pytest.raises(DimensionError):
        affine(Tensor(np.zeros(4)), Tensor(np.zeros((2, 3))), Tensor(np.zeros(2)))


def test_activations():
    np.testing.assert_array_equal(relu(Tensor([-2.0, 0.0, 3.0])).numpy(), [0, 0, 3])
    assert sigmoid(Tensor(0.0)).item() == 0.5
    big = sigmoid(Tensor(500.0)).item()
    assert 0.999 < big < 1.0
    small = sigmoid(Tensor(-500.0)).item()
    assert 0.0 < small < 1e-3


def test_relu_gradient_at_zero_is_zero():
    x = Tensor([0.0], requires_grad=True)
    tsum(relu(x)).backward()
    assert x.grad[0] == 0.0


def test_mse_loss_values(rng):
    a = rng.normal(size=(2, 3))
    assert mse_loss(Tensor(a), Tensor(a)).item() == 0.0
    assert mse_loss(Tensor(a + 1.0), Tensor(a)).item() == pytest.approx(1.0, abs=1e-5)
    b = rng.normal(size=(2, 3))
    with float64_mode():
        got = mse_loss(Tensor(a), Tensor(b)).item()
    assert got == pytest.approx(np.sum((a - b) ** 2) / 6, abs=1e-7)


def test_mse_loss_shape_mismatch():
    with pytest.raises(DimensionError):
        mse_loss(Tensor(np.zeros(3)), Tensor(np.zeros(4)))


# Backward


def test_backward_sum():
    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    tsum(x).backward()
    np.testing.assert_array_equal(x.grad, [1, 1, 1])


def test_backward_single_weight_closed_form():
    with float64_mode():
        w = Tensor([[1.5]], requires_grad=True)
        x, y = 2.0, 1.0
        mse_loss(matmul(w, Tensor([[x]])), Tensor([[y]])).backward()
    assert w.grad[0, 0] == pytest.approx(2 * x * (1.5 * x - y))


def test_backward_accumulates_fan_out():
    x = Tensor([2.0], requires_grad=True)
    tsum(x * x + x).backward()
    assert x.grad[0] == pytest.approx(5.0)


def test_backward_rejects_non_scalar():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with pytest.raises(UsageError):
        (x * 2.0).backward()


def test_backward_twice_needs_retain_graph():
    x = Tensor([1.0], requires_grad=True)
    loss = tsum(x * 3.0)
    loss.backward(retain_graph=True)
    loss.backward()
    assert x.grad[0] == pytest.approx(6.0)
    with pytest.raises(UsageError):
        loss.backward()


def test_no_grad_records_nothing():
    x = Tensor([1.0], requires_grad=True)
    with no_grad():
        y = x * 2.0
    assert not y.requires_grad


@pytest.mark.parametrize("seed", range(20))
def test_elementwise_gradients(seed):
    rng = np.random.default_rng(seed)
    a = away_from_zero(rng, (3, 4))
    b = rng.uniform(0.5, 2.0, size=(1, 4))
    check_grads(lambda x, y: tsum(relu(x) * y + exp(x) - x), a, b)
    check_grads(lambda x, y: mean(div(sigmoid(x), y)), a, b)
    check_grads(lambda x: tsum(cumsum(x, axis=1) * cumsum(x, axis=0)), a)
    weights = np.arange(24.0).reshape(6, 4)
    check_grads(lambda x, y: tsum(concat([x * y, exp(x)], axis=0) * weights), a, b)
    check_grads(lambda x: tsum(reshape(x, (4, 3)) * np.arange(12.0).reshape(4, 3)), a)


@pytest.mark.parametrize("seed", range(20))
def test_dense_gradients(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(5, 6))
    w = rng.normal(size=(4, 6))
    b = rng.normal(size=4)
    target = rng.normal(size=(5, 4))
    check_grads(lambda x_, w_, b_: mse_loss(affine(x_, w_, b_), Tensor(target)), x, w, b)
    check_grads(lambda a_, b_: tsum(matmul(a_, b_)), x, w.T.copy())


@pytest.mark.parametrize("seed", range(20))
def test_conv_and_pool_gradients(seed):
    rng = np.random.default_rng(seed)
    # distinct, well separated values keep every pooling argmax stable
    x = (rng.permutation(2 * 7 * 7) * 0.05).reshape(2, 7, 7)
    k = rng.normal(size=(3, 2, 3, 3))
    b = rng.normal(size=3)
    check_grads(lambda x_, k_, b_: tsum(sigmoid(conv2d(x_, k_, b_, stride=2, padding=1))), x, k, b)
    check_grads(lambda x_: tsum(maxpool2d(x_, 2, 2) * maxpool2d(x_, 2, 2)), x)


# Adam


def test_adam_zero_gradient_keeps_params():
    p = Tensor([1.0, -2.0], requires_grad=True)
    state = AdamState.for_params([p], lr=0.1)
    adam_step([p], [np.zeros(2)], state)
    np.testing.assert_array_equal(p.data, np.asarray([1.0, -2.0], dtype=p.data.dtype))
    assert state.t == 1


def test_adam_first_step_is_lr():
    with float64_mode():
        p = Tensor([0.0], requires_grad=True)
    state = AdamState.for_params([p], lr=0.1)
    adam_step([p], [np.ones(1)], state)
    assert p.data[0] == pytest.approx(-0.1, rel=1e-6)


def test_adam_matches_recurrence():
    with float64_mode():
        p = Tensor([0.5], requires_grad=True)
    state = AdamState.for_params([p], lr=0.01)
    grads = [np.array([0.3]), np.array([-0.7])]
    value, m, v = 0.5, 0.0, 0.0
    for t, g in enumerate(grads, start=1):
        adam_step([p], [g], state)
        m = 0.9 * m + 0.1 * g[0]
        v = 0.999 * v + 0.001 * g[0] ** 2
        value -= 0.01 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
    assert p.data[0] == pytest.approx(value, abs=1e-12)


def test_adam_rejects_nan_gradient():
    p = Tensor([1.0], requires_grad=True)
    state = AdamState.for_params([p], lr=0.1)
    with pytest.raises(NumericError):
        adam_step([p], [np.array([np.nan])], state)
    assert p.data[0] == 1.0
    assert state.t == 0


def test_adam_optimizer_descends():
    w = Tensor([3.0], requires_grad=True)
    optimizer = Adam([w], lr=0.1)
    for _ in range(200):
        optimizer.zero_grad()
        loss = mse_loss(w, Tensor([1.0]))
        loss.backward()
        optimizer.step()
    assert abs(w.data[0] - 1.0) < 0.05
