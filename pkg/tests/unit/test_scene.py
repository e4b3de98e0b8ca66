#!/usr/bin/env python3
"""Test the procedural sphere scene and NeRF-Synthetic dataset files."""

import json
import math

import numpy as np
import pytest

from nerf_stego.errors import ConfigError, FormatError
from nerf_stego.models import PosedImage, SceneSpec, Sphere, focal_from_fov
from nerf_stego.scene import (
    generate_training_views,
    load_nerf_synthetic,
    procedural_field,
    write_nerf_synthetic,
)


def test_point_at_sphere_center():
    spec = SceneSpec.default()
    rgb, sigma = procedural_field(spec, (0.6, 0.1, 0.3))
    assert rgb == pytest.approx((0.2, 0.9, 0.2))
    assert sigma == 40.0


def test_point_outside_every_sphere():
    rgb, sigma = procedural_field(SceneSpec.default(), (1.4, 1.4, -1.4))
    assert rgb == (1.0, 1.0, 1.0)
    assert sigma == 0.0


def test_boundary_counts_as_inside():
    spec = SceneSpec(spheres=(Sphere((0.0, 0.0, 0.0), 0.5, (0.1, 0.2, 0.3), 7.0),))
    assert procedural_field(spec, (0.5, 0.0, 0.0))[1] == 7.0
    assert procedural_field(spec, (0.5000001, 0.0, 0.0))[1] == 0.0


def test_sphere_outside_bounds_is_rejected():
    with pytest.raises(ConfigError):
        SceneSpec(spheres=(Sphere((1.4, 0.0, 0.0), 0.3, (1, 1, 1), 1.0),))


def test_empty_scene_renders_background():
    views = generate_training_views(SceneSpec(spheres=()), 1, 8, 8, n_samples=16)
    assert len(views) == 1
    np.testing.assert_array_equal(views[0].image, np.ones((3, 8, 8), dtype=np.float32))


def test_views_are_seeded():
    a = generate_training_views(SceneSpec.default(), 2, 8, 8, seed=5, n_samples=16)
    b = generate_training_views(SceneSpec.default(), 2, 8, 8, seed=5, n_samples=16)
    for va, vb in zip(a, b):
        np.testing.assert_array_equal(va.image, vb.image)
        np.testing.assert_array_equal(va.camera_to_world, vb.camera_to_world)


def test_default_scene_is_visible():
    view = generate_training_views(SceneSpec.default(), 1, 16, 16, seed=0, n_samples=64)[0]
    assert view.image.min() < 0.9


def test_focal_from_fov():
    assert focal_from_fov(180, math.pi / 2) == pytest.approx(90.0)


def test_dataset_round_trip(tmp_path):
    views = [
        PosedImage(image=np.full((3, 8, 8), 0.5, dtype=np.float32), camera_to_world=np.eye(4),
                   focal_px=8.0),
    ]
    write_nerf_synthetic(tmp_path, views)
    loaded = load_nerf_synthetic(tmp_path)
    assert len(loaded) == 1
    np.testing.assert_array_equal(loaded[0].camera_to_world, np.eye(4))
    assert loaded[0].focal_px == pytest.approx(8.0)
    np.testing.assert_allclose(loaded[0].image, 0.5, atol=1 / 255)


def test_dataset_resize(tmp_path):
    views = [PosedImage(image=np.zeros((3, 16, 16), dtype=np.float32),
                        camera_to_world=np.eye(4), focal_px=16.0)]
    write_nerf_synthetic(tmp_path, views)
    loaded = load_nerf_synthetic(tmp_path, resolution=8)
    assert loaded[0].image.shape == (3, 8, 8)
    assert loaded[0].focal_px == pytest.approx(8.0)


def test_dataset_resize_keeps_mean_brightness(tmp_path):
    rng = np.random.default_rng(3)
    ramp = np.linspace(0.0, 1.0, 32, dtype=np.float32)
    image = np.stack([np.tile(ramp, (32, 1)), np.tile(ramp[:, None], (1, 32)),
                      rng.random((32, 32), dtype=np.float32)])
    write_nerf_synthetic(tmp_path, [PosedImage(image=image, camera_to_world=np.eye(4),
                                               focal_px=32.0)])
    loaded = load_nerf_synthetic(tmp_path, resolution=8)[0].image
    assert loaded.shape == (3, 8, 8)
    assert abs(float(loaded.mean()) - float(image.mean())) < 0.02
    for channel in range(3):
        assert abs(float(loaded[channel].mean()) - float(image[channel].mean())) < 0.02


def test_dataset_missing_fields(tmp_path):
    (tmp_path / "transforms_train.json").write_text(json.dumps({"frames": []}))
    with pytest.raises(FormatError, match="camera_angle_x"):
        load_nerf_synthetic(tmp_path)


def test_dataset_missing_images(tmp_path):
    meta = {"camera_angle_x": 0.7,
            "frames": [{"file_path": "./train/r_0", "transform_matrix": np.eye(4).tolist()}]}
    (tmp_path / "transforms_train.json").write_text(json.dumps(meta))
    with pytest.raises(FormatError, match="only 0 images"):
        load_nerf_synthetic(tmp_path)


def test_dataset_missing_directory(tmp_path):
    with pytest.raises(FormatError):
        load_nerf_synthetic(tmp_path / "nope")
