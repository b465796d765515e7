"""Dataset assembly: variants, split sizes, and sequence generation.

Sequence i of a dataset depends only on (config.seed, i), so sequences
can be generated in any order, in parallel, or individually, always
reproducing the same bytes.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, replace
from typing import Iterator

from . import scene as scene_mod
from .errors import GenerationExhaustedError, InvalidParameterError
from .raster import VideoSample, render_video
from .scene import OOD_KINDS, SPMOT_CANVAS, VMDS_CANVAS, VMDS_VARIANTS, apply_ood_schedule
from .seeding import rng_for

GENERATOR_VERSION = "0.1.0"

FAMILIES = ("vmds", "spmot")
ALL_VARIANTS = ("standard",) + tuple(v for v in VMDS_VARIANTS if v != "standard") + OOD_KINDS
SPLITS = ("train", "val", "test")

# Downsampling factor applied after rendering linear-motion sprites.
SPMOT_DOWNSAMPLE = 2

_VMDS_SPLIT_SIZES = {"train": 10_000, "val": 1_000, "test": 1_000}
_SPMOT_SPLIT_SIZES = {"train": 9_600, "val": 384, "test": 1_000}


@dataclass(frozen=True)
class DatasetConfig:
    family: str
    variant: str
    split: str
    num_sequences: int
    length: int
    canvas: tuple[int, int]
    seed: int
    black_background: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown family {self.family!r}")
        if self.variant not in ALL_VARIANTS:
            raise InvalidParameterError(f"unknown variant {self.variant!r}")
        if self.family == "spmot" and self.variant != "standard":
            raise InvalidParameterError("spmot supports only the standard variant")
        if self.split not in SPLITS:
            raise InvalidParameterError(f"unknown split {self.split!r}")
        if self.length < 1:
            raise InvalidParameterError(f"length must be >= 1, got {self.length}")
        if self.num_sequences < 0:
            raise InvalidParameterError(f"num_sequences must be >= 0, got {self.num_sequences}")


def config_hash(config: DatasetConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def default_config(
    family: str,
    variant: str = "standard",
    split: str = "test",
    seed: int = 0,
    black_background: bool = False,
) -> DatasetConfig:
    """Canonical split sizes and sequence lengths for each dataset.

    dSprites-style: train 10,000 / val 1,000 / test 1,000 sequences;
    train and val are 10 frames, the standard test split 20 frames, and
    every challenge / out-of-distribution set 1,000 test sequences of 10
    frames. Linear-motion sprites: 9600 / 384 / 1000 sequences of 10
    frames, rendered at 128x128 and downsampled to 64x64.
    """
    if family == "vmds":
        if variant != "standard" and split != "test":
            raise InvalidParameterError(
                f"variant {variant!r} only exists as a test set, got split {split!r}"
            )
        length = 20 if (variant == "standard" and split == "test") else 10
        num = _VMDS_SPLIT_SIZES[split] if variant == "standard" else 1_000
        return DatasetConfig(
            family="vmds",
            variant=variant,
            split=split,
            num_sequences=num,
            length=length,
            canvas=VMDS_CANVAS,
            seed=seed,
            black_background=black_background,
        )
    if family == "spmot":
        if variant != "standard":
            raise InvalidParameterError("spmot supports only the standard variant")
        return DatasetConfig(
            family="spmot",
            variant="standard",
            split=split,
            num_sequences=_SPMOT_SPLIT_SIZES[split],
            length=10,
            canvas=(VMDS_CANVAS[0], VMDS_CANVAS[1]),
            seed=seed,
            black_background=black_background,
        )
    raise InvalidParameterError(f"unknown family {family!r}")


def build_scene(config: DatasetConfig, index: int):
    """Deterministically build the scene for sequence `index`."""
    rng = rng_for(config.seed, index)
    if config.family == "spmot":
        return scene_mod.build_spmot_scene(rng, config.length)
    if config.variant in OOD_KINDS:
        base = scene_mod.build_vmds_scene(rng, config.length, "standard")
        built = apply_ood_schedule(base, config.variant, rng)
    else:
        built = scene_mod.build_vmds_scene(rng, config.length, config.variant)
    if config.black_background:
        built = replace(built, background_color=(0.0, 0.0, 0.0))
    return built


def generate_sequence(config: DatasetConfig, index: int) -> VideoSample:
    """Render sequence `index`; reproducible independent of other sequences."""
    try:
        built = build_scene(config, index)
        factor = SPMOT_DOWNSAMPLE if config.family == "spmot" else 1
        return render_video(
            built,
            downsample_factor=factor,
            seed_info={
                "seed": config.seed,
                "sequence_index": index,
                "config_hash": config_hash(config),
            },
        )
    except GenerationExhaustedError as err:
        raise GenerationExhaustedError(
            f"sequence {index} failed: {err}", err.rejects
        ) from err


def generate_dataset(config: DatasetConfig) -> Iterator[VideoSample]:
    """Stream all sequences of a dataset in index order."""
    for i in range(config.num_sequences):
        yield generate_sequence(config, i)
