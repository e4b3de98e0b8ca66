"""Shared fixtures: tiny fields, keys and embed settings that train in seconds."""

import json

import numpy as np
import pytest

from nerf_stego.field import init_field_params
from nerf_stego.models import ExtractorConfig, FieldConfig, ViewKey
from nerf_stego.pipeline import EmbedOptions

TINY_FIELD = FieldConfig(l_pos=2, l_dir=1, depth=1, width=8)

# Profile overrides that shrink every CLI command to a 16x16 toy run
TINY_PROFILE = {
    "resolution": 16,
    "field": {"l_pos": 2, "l_dir": 1, "depth": 1, "width": 8},
    "n_coarse": 8,
    "n_fine": 4,
    "n_views": 2,
    "field_iters": 3,
    "batch_rays": 32,
    "extractor_lr": 0.01,
    "epochs": 400,
}


def tiny_extractor_config(depth: int = 1) -> ExtractorConfig:
    return ExtractorConfig(
        depth=depth, height=16, width=16, conv1_channels=4, conv2_channels=4, fc_hidden=16,
    )


@pytest.fixture
def small_extractor():
    """Factory for narrow 16x16 extractor geometries."""
    return tiny_extractor_config


@pytest.fixture
def tiny_field():
    return init_field_params(TINY_FIELD, seed=0)


@pytest.fixture
def tiny_key():
    return ViewKey(theta_deg=30.0, phi_deg=-30.0, width=16, height=16)


@pytest.fixture
def tiny_options():
    """Zero-initialized output layer: every bit is right after the first Adam step."""
    return EmbedOptions(
        epochs=50,
        lr=1e-2,
        seed=0,
        n_coarse=8,
        n_fine=4,
        extractor_config=tiny_extractor_config(1),
        zero_init_output=True,
    )


@pytest.fixture
def tiny_profile(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY_PROFILE))
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
