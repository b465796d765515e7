from dataclasses import replace

import numpy as np
import pytest

from objmot.datasets import (
    DatasetConfig,
    build_scene,
    config_hash,
    default_config,
    generate_dataset,
    generate_sequence,
)
from objmot.errors import InvalidParameterError


def test_default_config_vmds_splits():
    train = default_config("vmds", "standard", "train")
    assert train.num_sequences == 10_000 and train.length == 10
    val = default_config("vmds", "standard", "val")
    assert val.num_sequences == 1_000 and val.length == 10
    test = default_config("vmds", "standard", "test")
    assert test.num_sequences == 1_000 and test.length == 20
    assert test.canvas == (64, 64)


def test_default_config_challenge_and_ood_sets():
    for variant in ("occlusion", "small", "large", "same_color",
                    "rotation", "color_change", "size_change"):
        cfg = default_config("vmds", variant, "test")
        assert cfg.num_sequences == 1_000 and cfg.length == 10
        with pytest.raises(InvalidParameterError):
            default_config("vmds", variant, "train")


def test_default_config_spmot():
    assert default_config("spmot", "standard", "train").num_sequences == 9_600
    assert default_config("spmot", "standard", "val").num_sequences == 384
    test = default_config("spmot", "standard", "test")
    assert test.num_sequences == 1_000 and test.length == 10


def test_invalid_combinations():
    with pytest.raises(InvalidParameterError):
        default_config("spmot", "occlusion", "test")
    with pytest.raises(InvalidParameterError):
        default_config("vor", "standard", "test")
    with pytest.raises(InvalidParameterError):
        DatasetConfig(family="spmot", variant="occlusion", split="test",
                      num_sequences=1, length=10, canvas=(64, 64), seed=0)


def test_generate_dataset_empty_stream():
    cfg = replace(default_config("vmds", "standard", "test"), num_sequences=0)
    assert list(generate_dataset(cfg)) == []


def test_sequence_regeneration_byte_exact():
    cfg = replace(default_config("vmds", "standard", "test", seed=5),
                  num_sequences=3, length=8)
    streamed = list(generate_dataset(cfg))
    solo = generate_sequence(cfg, 1)
    assert np.array_equal(streamed[1].frames, solo.frames)
    assert np.array_equal(streamed[1].labels, solo.labels)
    assert np.array_equal(streamed[1].visibility, solo.visibility)


def test_occlusion_variant_metadata_has_crossing():
    cfg = replace(default_config("vmds", "occlusion", "test", seed=2),
                  num_sequences=5)
    for sample in generate_dataset(cfg):
        assert sample.scene.crossing is not None


def test_variant_constraints_hold():
    for variant, check in (
        ("small", lambda s: all(o.sprite.scale_index == 0 for o in s.objects)),
        ("large", lambda s: all(o.sprite.scale_index == 5 for o in s.objects)),
        ("same_color", lambda s: len({o.sprite.color for o in s.objects}) == 1),
    ):
        cfg = replace(default_config("vmds", variant, "test", seed=3), num_sequences=10)
        for i in range(cfg.num_sequences):
            assert check(build_scene(cfg, i)), (variant, i)


def test_black_background_flag():
    cfg = replace(default_config("vmds", "standard", "test", seed=1, black_background=True),
                  num_sequences=1, length=3)
    scene = build_scene(cfg, 0)
    assert scene.background_color == (0.0, 0.0, 0.0)


def test_spmot_downsampled_to_64():
    cfg = replace(default_config("spmot", "standard", "test", seed=4), num_sequences=1)
    sample = generate_sequence(cfg, 0)
    assert sample.frames.shape[1:] == (64, 64, 3)
    assert sample.labels.shape[1:] == (64, 64)


def test_object_count_distribution_uniform():
    cfg = replace(default_config("vmds", "standard", "test", seed=11), num_sequences=1_000)
    counts = np.zeros(5, dtype=int)
    for i in range(cfg.num_sequences):
        counts[len(build_scene(cfg, i).objects)] += 1
    freqs = counts[1:5] / cfg.num_sequences
    assert np.all(np.abs(freqs - 0.25) <= 0.05)


def test_config_hash_changes_with_config():
    a = default_config("vmds", "standard", "test", seed=1)
    b = default_config("vmds", "standard", "test", seed=2)
    assert config_hash(a) != config_hash(b)
    assert config_hash(a) == config_hash(default_config("vmds", "standard", "test", seed=1))
