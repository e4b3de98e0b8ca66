#!/usr/bin/env python3
"""
Desk-scale acceptance runs: a trained procedural field, exact embedding at
D = 1..3, training time against depth, off-key randomness and viewpoint
sensitivity on every sweep axis.

These train for minutes to hours on a CPU and are deselected by default.
Run them with ``pytest -m slow``.
"""

import math
import statistics

import numpy as np
import pytest

from nerf_stego.codec import bits_to_planes, max_message_bytes
from nerf_stego.config import PROFILES
from nerf_stego.extractor import train_extractor
from nerf_stego.field import evaluate_psnr, field_eval, train_field
from nerf_stego.models import SceneSpec, ViewKey
from nerf_stego.pipeline import (
    AXES,
    DEFAULT_OFFSETS,
    EmbedOptions,
    attacker_sweep,
    embed,
    evaluate_views,
    extract_message,
    message_planes,
    offkey_grid,
    render_secret_view,
)
from nerf_stego.scene import generate_training_views
from nerf_stego.storage import write_report

pytestmark = pytest.mark.slow

DESK = PROFILES["desk"]
MESSAGE = b"meet me at noon!"
SECRET = ViewKey(theta_deg=30.0, phi_deg=-30.0)


def desk_options(**overrides) -> EmbedOptions:
    values = dict(epochs=DESK.epochs, lr=DESK.extractor_lr, n_coarse=DESK.n_coarse,
                  n_fine=DESK.n_fine, workers=4)
    values.update(overrides)
    return EmbedOptions(**values)


@pytest.fixture(scope="module")
def desk_views():
    return generate_training_views(SceneSpec.default(), DESK.n_views + 1, 64, 64, seed=0,
                                   workers=4)


@pytest.fixture(scope="module")
def desk_field(desk_views):
    params, _ = train_field(desk_views[:-1], DESK.field, iters=DESK.field_iters,
                            batch_rays=DESK.batch_rays, lr=DESK.field_lr,
                            n_coarse=DESK.n_coarse, n_fine=DESK.n_fine)
    return params


@pytest.fixture(scope="module")
def desk_bundle(desk_field):
    bundle, _ = embed(desk_field, SECRET, MESSAGE, 1, desk_options())
    return bundle


def test_held_out_view_psnr(desk_field, desk_views):
    (score,) = evaluate_psnr(desk_field, desk_views[-1:], DESK.n_coarse, DESK.n_fine)
    assert score > 20.0


def test_density_follows_the_spheres(desk_field):
    up = np.array([0.0, 0.0, 1.0])
    _, inside = field_eval(desk_field.fine, desk_field.config, np.zeros(3), up)
    _, outside = field_eval(desk_field.fine, desk_field.config, np.array([1.4, -1.4, -1.4]), up)
    assert inside.item() > outside.item()


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_backdoor_is_exact(desk_field, depth):
    bundle, report = embed(desk_field, SECRET, MESSAGE, depth, desk_options())
    assert report.epochs_to_100 is not None and report.epochs_to_100 <= DESK.epochs
    assert extract_message(bundle, SECRET) == MESSAGE


def test_off_key_views_look_random(desk_bundle):
    views = offkey_grid(SECRET)
    assert len(views) >= 20
    planes = message_planes(MESSAGE, 1, SECRET)
    accs = [acc for acc, _ in evaluate_views(desk_bundle, planes, views, workers=4)]
    assert 0.40 <= statistics.fmean(accs) <= 0.65
    assert max(accs) < 0.9


def test_epochs_to_perfect_grow_with_depth(desk_field):
    options = desk_options()
    image = render_secret_view(desk_field, SECRET, options.n_coarse, options.n_fine,
                               options.background, options.seed, options.workers)
    rng = np.random.default_rng(0)
    medians = []
    for depth in (1, 2, 3):
        message = rng.bytes(max_message_bytes(depth, SECRET.height, SECRET.width) // 2)
        planes = bits_to_planes(message, depth, SECRET.height, SECRET.width)
        epochs = []
        for seed in range(3):
            _, trace = train_extractor(image, planes, epochs=DESK.epochs, lr=DESK.extractor_lr,
                                       seed=seed, stop_at_perfect=True, log_every=0)
            epochs.append(math.inf if trace.epochs_to_perfect is None
                          else trace.epochs_to_perfect)
        medians.append(statistics.median(epochs))
    assert math.isfinite(medians[0])
    assert medians[0] <= medians[1] <= medians[2]


@pytest.mark.parametrize("axis", AXES)
def test_key_sensitivity(desk_bundle, axis, tmp_path):
    report = attacker_sweep(desk_bundle, SECRET, axis, DEFAULT_OFFSETS, workers=4)
    by_offset = {row.offset_deg: row for row in report.rows}
    assert by_offset[0.0].acc == 1.0
    assert by_offset[0.1].acc < 1.0
    assert by_offset[1.0].rs_bpp < report.depth / 2
    for offset in (1.0, 5.0):
        assert by_offset[offset].acc < by_offset[0.0].acc

    lines = write_report(tmp_path / f"sweep_{axis}.csv", report).read_text().splitlines()
    assert lines[0] == "theta_deg,phi_deg,offset_deg,acc,rs_bpp"
    assert len(lines) == len(DEFAULT_OFFSETS) + 1
    assert [float(line.split(",")[2]) for line in lines[1:]] == list(DEFAULT_OFFSETS)
    assert lines[1].split(",")[3] == "1.0"
