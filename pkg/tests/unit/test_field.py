#!/usr/bin/env python3
"""Test positional encoding, the field MLPs and photometric training."""

import math

import numpy as np
import pytest

from nerf_stego.errors import NumericError, UsageError
from nerf_stego.field import (
    evaluate_psnr,
    field_eval,
    init_field_params,
    positional_encode,
    psnr,
    train_field,
)
from nerf_stego.models import FieldConfig, PosedImage
from nerf_stego.volume import pose_from_angles

TINY = FieldConfig(l_pos=2, l_dir=1, depth=1, width=8)


def unit_dirs(rng, n):
    d = rng.normal(size=(n, 3))
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def white_views(n=2, size=8, level=1.0):
    return [
        PosedImage(image=np.full((3, size, size), level, dtype=np.float32),
                   camera_to_world=pose_from_angles(40.0 * i, -30.0, 4.0), focal_px=10.0)
        for i in range(n)
    ]


def test_positional_encode_examples():
    np.testing.assert_allclose(positional_encode(0.0, 2), [0, 0, 1, 0, 1], atol=1e-12)
    np.testing.assert_allclose(positional_encode(1.0, 1, include_raw=False), [0, -1], atol=1e-12)


def test_positional_encode_matches_formula(rng):
    p = rng.normal(size=3)
    got = positional_encode(p, 6)
    assert got.shape == (3 * 13,)
    for c in range(3):
        row = got[c * 13:(c + 1) * 13]
        assert row[0] == p[c]
        for i in range(6):
            assert row[1 + 2 * i] == pytest.approx(math.sin(2 ** i * math.pi * p[c]), abs=1e-7)
            assert row[2 + 2 * i] == pytest.approx(math.cos(2 ** i * math.pi * p[c]), abs=1e-7)


def test_zero_heads_give_empty_grey_field(rng):
    params = init_field_params(TINY, seed=0, zero_heads=True)
    rgb, sigma = field_eval(params.coarse, TINY, rng.normal(size=(10, 3)), unit_dirs(rng, 10))
    np.testing.assert_array_equal(sigma.numpy(), 0.0)
    np.testing.assert_allclose(rgb.numpy(), 0.5)


def test_density_ignores_direction(rng):
    params = init_field_params(TINY, seed=3)
    x = rng.normal(size=(100, 3))
    _, s1 = field_eval(params.fine, TINY, x, unit_dirs(rng, 100))
    _, s2 = field_eval(params.fine, TINY, x, unit_dirs(rng, 100))
    np.testing.assert_array_equal(s1.numpy(), s2.numpy())


def test_output_ranges(rng):
    params = init_field_params(FieldConfig(l_pos=3, l_dir=2, depth=2, width=16), seed=1)
    config = params.config
    rgb, sigma = field_eval(params.coarse, config, rng.normal(size=(50, 3)) * 3, unit_dirs(rng, 50))
    assert rgb.shape == (50, 3) and sigma.shape == (50,)
    assert np.all((rgb.numpy() >= 0) & (rgb.numpy() <= 1))
    assert np.all(sigma.numpy() >= 0)


def test_single_point_shapes():
    params = init_field_params(TINY, seed=0)
    rgb, sigma = field_eval(params.coarse, TINY, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    assert rgb.shape == (3,) and sigma.shape == ()


def test_field_eval_rejects_bad_input():
    params = init_field_params(TINY, seed=0)
    with pytest.raises(NumericError):
        field_eval(params.coarse, TINY, np.array([np.inf, 0, 0]), np.array([1.0, 0, 0]))
    with pytest.raises(UsageError):
        field_eval(params.coarse, TINY, np.zeros(3), np.array([2.0, 0, 0]))
    with pytest.raises(UsageError):
        field_eval(params.coarse, TINY, np.zeros(3), np.array([1.0 + 5e-6, 0, 0]))
    field_eval(params.coarse, TINY, np.zeros(3), np.array([1.0 + 5e-7, 0, 0]))


def test_named_tensors_cover_both_networks():
    params = init_field_params(TINY, seed=0)
    names = params.named_tensors()
    assert "coarse/trunk0.w" in names and "fine/rgb.b" in names
    assert len(names) == len(params.parameters())


def test_train_field_on_white_images_converges():
    params, trace = train_field(white_views(), TINY, iters=500, batch_rays=64, lr=5e-3,
                                n_coarse=8, n_fine=0, log_every=0)
    assert len(trace.losses) == 500
    assert all(math.isfinite(v) for v in trace.losses)
    assert np.mean(trace.losses[-10:]) < 0.01


def test_train_field_loss_trends_down():
    _, trace = train_field(white_views(level=0.5), TINY, iters=400, batch_rays=64, lr=1e-3,
                           n_coarse=8, n_fine=0, log_every=0)
    window = 50
    avg = np.convolve(trace.losses, np.ones(window) / window, mode="valid")
    checkpoints = avg[::window]
    rises = sum(1 for a, b in zip(checkpoints, checkpoints[1:]) if b > a * 1.05 + 1e-4)
    assert rises <= 1
    assert checkpoints[-1] < checkpoints[0]


def test_train_field_reports_progress():
    seen = []
    train_field(white_views(1), TINY, iters=3, batch_rays=16, n_coarse=4, n_fine=4,
                progress=lambda it, loss: seen.append(it))
    assert seen == [0, 1, 2]


def test_train_field_input_checks():
    with pytest.raises(UsageError):
        train_field([], TINY, iters=1)
    with pytest.raises(UsageError):
        train_field(white_views(1), TINY, iters=0)


def test_psnr():
    a = np.zeros((3, 4, 4))
    assert psnr(a, a) == math.inf
    assert psnr(a + 0.1, a) == pytest.approx(20.0)


def test_evaluate_psnr_one_score_per_view():
    params = init_field_params(TINY, seed=0)
    scores = evaluate_psnr(params, white_views(2), n_coarse=4, n_fine=0)
    assert len(scores) == 2
    assert all(s > 0 for s in scores)
