#!/usr/bin/env python3
"""Test model containers, key files, report exports and image files."""

import json
import struct

import numpy as np
import pytest

from nerf_stego.errors import FormatError
from nerf_stego.extractor import init_extractor
from nerf_stego.models import BundleManifest, StegoBundle, SweepReport, SweepRow, ViewKey
from nerf_stego.storage import (
    MAGIC,
    decode_container,
    encode_bundle,
    encode_container,
    encode_extractor,
    key_from_dict,
    load_bundle,
    load_extractor,
    load_field,
    load_key,
    load_model,
    read_container,
    read_image,
    save_bundle,
    save_extractor,
    save_field,
    save_key,
    save_model,
    sweep_csv,
    sweep_json,
    write_image,
    write_report,
)


def raw_container(header: dict, payload: bytes, magic: bytes = MAGIC) -> bytes:
    header_bytes = json.dumps(header).encode("utf-8")
    return struct.pack("<4sIQ", magic, 1, len(header_bytes)) + header_bytes + payload


def make_bundle(field, extractor):
    manifest = BundleManifest(
        depth=1, height=16, width=16, n_coarse=8, n_fine=4, background=(1.0, 1.0, 1.0),
        created="test", seed=0, payload_bytes=3,
    )
    return StegoBundle(field=field, extractor=extractor, manifest=manifest)


def assert_same_tensors(a, b):
    assert a.keys() == b.keys()
    for name in a:
        np.testing.assert_array_equal(a[name].numpy(), b[name].numpy())


# Containers


def test_extractor_round_trip_is_bit_exact(tmp_path, small_extractor):
    params = init_extractor(small_extractor(2), seed=9)
    path = save_extractor(tmp_path / "x.nrsg", params)
    loaded = load_extractor(path)
    assert loaded.config == params.config
    assert_same_tensors(params.named_tensors(), loaded.named_tensors())


def test_field_round_trip_is_bit_exact(tmp_path, tiny_field):
    loaded = load_field(save_field(tmp_path / "f.nrsg", tiny_field))
    assert loaded.config == tiny_field.config
    assert_same_tensors(tiny_field.named_tensors(), loaded.named_tensors())


def test_bundle_round_trip(tmp_path, tiny_field, small_extractor):
    bundle = make_bundle(tiny_field, init_extractor(small_extractor(1)))
    path = save_bundle(tmp_path / "b.nrsg", bundle)
    loaded = load_bundle(path)
    assert loaded.manifest == bundle.manifest
    assert_same_tensors(bundle.field.named_tensors(), loaded.field.named_tensors())
    assert_same_tensors(bundle.extractor.named_tensors(), loaded.extractor.named_tensors())
    # a bundle also serves as a field
    assert_same_tensors(tiny_field.named_tensors(), load_field(path).named_tensors())
    assert isinstance(load_model(path), StegoBundle)


def test_save_model_dispatches_on_type(tmp_path, tiny_field, small_extractor):
    extractor = init_extractor(small_extractor(1))
    assert isinstance(load_model(save_model(tmp_path / "f.nrsg", tiny_field)), type(tiny_field))
    assert load_model(save_model(tmp_path / "x.nrsg", extractor)).config == extractor.config
    with pytest.raises(TypeError):
        save_model(tmp_path / "k.nrsg", ViewKey(theta_deg=0.0, phi_deg=-10.0))


def test_bundle_header_never_holds_the_key(tiny_field, small_extractor):
    bundle = make_bundle(tiny_field, init_extractor(small_extractor(1)))
    header = decode_container(encode_bundle(bundle)).header
    text = json.dumps(header)
    assert "theta" not in text and "phi" not in text


def test_container_bytes_are_stable(small_extractor):
    params = init_extractor(small_extractor(1), seed=2)
    assert encode_extractor(params) == encode_extractor(params)


def test_unknown_header_fields_are_ignored():
    blob = encode_container("extractor", {"depth": 1}, {"a": np.ones(2)}, future_field={"x": 1})
    container = decode_container(blob)
    np.testing.assert_array_equal(container.tensors["a"], [1.0, 1.0])
    assert container.header["future_field"] == {"x": 1}


def test_bad_magic():
    blob = encode_container("extractor", {}, {"a": np.ones(2)})
    with pytest.raises(FormatError, match="magic"):
        decode_container(b"XXXX" + blob[4:])


def test_bad_version():
    blob = bytearray(encode_container("extractor", {}, {"a": np.ones(2)}))
    blob[4] = 7
    with pytest.raises(FormatError, match="version"):
        decode_container(bytes(blob))


def test_byte_len_must_match_shape():
    header = {"model_type": "extractor", "config": {}, "tensors": [
        {"name": "a", "shape": [3], "dtype": "f32", "byte_offset": 0, "byte_len": 8},
    ]}
    with pytest.raises(FormatError, match="byte_len"):
        decode_container(raw_container(header, bytes(8)))


def test_truncated_payload():
    blob = encode_container("extractor", {}, {"a": np.ones(4)})
    with pytest.raises(FormatError):
        decode_container(blob[:-4])


def test_truncated_header():
    blob = encode_container("extractor", {}, {"a": np.ones(4)})
    with pytest.raises(FormatError):
        decode_container(blob[:20])


def test_overlapping_tensors():
    header = {"model_type": "extractor", "config": {}, "tensors": [
        {"name": "a", "shape": [2], "dtype": "f32", "byte_offset": 0, "byte_len": 8},
        {"name": "b", "shape": [2], "dtype": "f32", "byte_offset": 4, "byte_len": 8},
    ]}
    with pytest.raises(FormatError, match="overlap"):
        decode_container(raw_container(header, bytes(16)))


def test_unknown_model_type():
    with pytest.raises(FormatError, match="model_type"):
        decode_container(raw_container({"model_type": "mesh", "config": {}, "tensors": []}, b""))


def test_wrong_kind_of_model(tmp_path, small_extractor):
    path = save_extractor(tmp_path / "x.nrsg", init_extractor(small_extractor(1)))
    with pytest.raises(FormatError):
        load_field(path)
    with pytest.raises(FormatError):
        load_bundle(path)


def test_missing_model_file(tmp_path):
    with pytest.raises(FormatError, match="not found"):
        read_container(tmp_path / "missing.nrsg")


# Key files


def test_key_round_trip(tmp_path):
    key = ViewKey(theta_deg=30.0, phi_deg=-30.0, width=32, height=24, radius=3.5)
    assert load_key(save_key(tmp_path / "key.json", key)) == key


def test_key_defaults_fill_in():
    key = key_from_dict({"theta_deg": 10, "phi_deg": -20})
    assert key.width == 64 and key.radius == 4.0


@pytest.mark.parametrize("data", [
    {"phi_deg": -30},
    {"theta_deg": "30", "phi_deg": -30},
    {"theta_deg": 30, "phi_deg": -30, "width": 16.5},
    {"theta_deg": 30, "phi_deg": 45},
    [30, -30],
])
def test_bad_keys(data):
    with pytest.raises(FormatError):
        key_from_dict(data)


def test_key_file_not_json(tmp_path):
    path = tmp_path / "key.json"
    path.write_text("{theta")
    with pytest.raises(FormatError):
        load_key(path)


# Reports


def sample_report():
    return SweepReport(axis="theta", depth=1, rows=[
        SweepRow(30.0, -30.0, 0.0, 1.0, 1.0),
        SweepRow(31.0, -30.0, 1.0, 0.5, 0.0),
    ])


def test_sweep_csv():
    lines = sweep_csv(sample_report()).splitlines()
    assert lines[0] == "theta_deg,phi_deg,offset_deg,acc,rs_bpp"
    assert lines[1] == "30.0,-30.0,0.0,1.0,1.0"
    assert len(lines) == 3


def test_sweep_json():
    data = json.loads(sweep_json(sample_report()))
    assert data["axis"] == "theta"
    assert data["rows"][1]["acc"] == 0.5


def test_write_report_picks_format(tmp_path):
    write_report(tmp_path / "s.json", sample_report())
    write_report(tmp_path / "s.csv", sample_report())
    assert json.loads((tmp_path / "s.json").read_text())["depth"] == 1
    assert (tmp_path / "s.csv").read_text().startswith("theta_deg,")


# Images


@pytest.mark.parametrize("name", ["view.png", "view.ppm"])
def test_image_round_trip(tmp_path, rng, name):
    image = rng.random((3, 5, 7)).astype(np.float32)
    loaded = read_image(write_image(tmp_path / name, image))
    assert loaded.shape == (3, 5, 7)
    np.testing.assert_allclose(loaded, image, atol=0.5 / 255 + 1e-6)


def test_ppm_header(tmp_path):
    path = write_image(tmp_path / "v.ppm", np.zeros((3, 2, 3)))
    assert path.read_bytes().startswith(b"P6")


def test_unreadable_image(tmp_path):
    path = tmp_path / "bad.png"
    path.write_bytes(b"not an image")
    with pytest.raises(FormatError):
        read_image(path)
