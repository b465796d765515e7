"""Symbolic scene construction for all dataset variants.

A scene fully determines a rendered video: each object carries a sprite
description (shape, scale, orientation, color), a trajectory, per-frame
transformation schedules (rotation rate, hue drift rate, size schedule)
and a depth rank. Construction is pure given the generator, so the same
seed always yields a bit-identical scene.
"""

import colorsys
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .raster import N_SCALES, rasterize_sprite
from .trajectory import (
    CrossingRecord,
    Trajectory,
    sample_crossing_trajectories,
    sample_linear_trajectory,
    sample_trajectory,
    vmds_gp_params,
)

VMDS_SHAPES = ("square", "ellipse", "heart")
SPMOT_SHAPES = ("circle", "triangle", "square")
N_ORIENTATIONS = 40

VMDS_CANVAS = (64, 64)
SPMOT_CANVAS = (128, 128)

# Fully saturated six-color palette for the linear-motion sprite dataset.
SPMOT_PALETTE = (
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
    (1.0, 0.0, 1.0),
    (0.0, 1.0, 1.0),
)

SPMOT_SPEED_RANGE = (-3.0, 3.0)
SPMOT_POSITION_BOUNDS = (16.0, 112.0)

VMDS_VARIANTS = ("standard", "occlusion", "small", "large", "same_color")
OOD_KINDS = ("rotation", "color_change", "size_change")


@dataclass(frozen=True)
class SpriteSpec:
    """Frame-0 appearance of one sprite."""

    shape: str
    scale_index: int
    orientation: float
    color: tuple[float, float, float]

    def __post_init__(self):
        if not 0 <= self.scale_index < N_SCALES:
            raise InvalidParameterError(f"scale_index out of range: {self.scale_index}")
        if any(not 0.0 <= c <= 1.0 for c in self.color):
            raise InvalidParameterError(f"color components must be in [0,1], got {self.color}")


@dataclass(frozen=True)
class ScheduledObject:
    """One object with its motion, transformation schedules and depth rank."""

    sprite: SpriteSpec
    trajectory: Trajectory
    size_schedule: tuple[int, ...]
    depth_rank: int
    rotation_rate: float = 0.0  # radians per frame, signed
    hue_rate: float = 0.0  # hue turns per frame, signed

    def __post_init__(self):
        sched = tuple(int(s) for s in self.size_schedule)
        if len(sched) != len(self.trajectory):
            raise InvalidParameterError("size_schedule length must equal trajectory length")
        if any(abs(a - b) > 1 for a, b in zip(sched, sched[1:])):
            raise InvalidParameterError("consecutive size_schedule entries may differ by at most 1")
        object.__setattr__(self, "size_schedule", sched)

    def orientation_at(self, t: int) -> float:
        return self.sprite.orientation + t * self.rotation_rate

    def scale_at(self, t: int) -> int:
        return self.size_schedule[t]

    def color_at(self, t: int) -> tuple[float, float, float]:
        if self.hue_rate == 0.0:
            return self.sprite.color
        h, s, v = colorsys.rgb_to_hsv(*self.sprite.color)
        return colorsys.hsv_to_rgb((h + t * self.hue_rate) % 1.0, s, v)


@dataclass(frozen=True)
class SceneSpec:
    """Everything needed to render one video."""

    objects: tuple[ScheduledObject, ...]
    background_color: tuple[float, float, float]
    canvas: tuple[int, int]
    length: int
    crossing: CrossingRecord | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if not 1 <= len(self.objects) <= 4:
            raise InvalidParameterError(f"scenes hold 1-4 objects, got {len(self.objects)}")
        ranks = sorted(o.depth_rank for o in self.objects)
        if ranks != list(range(len(self.objects))):
            raise InvalidParameterError(f"depth ranks must be a permutation of 0..n-1, got {ranks}")


def _frame0_area(sprite: SpriteSpec, trajectory: Trajectory, canvas) -> int:
    mask = rasterize_sprite(
        sprite.shape, sprite.scale_index, sprite.orientation, tuple(trajectory.points[0]), canvas
    )
    return int(mask.sum())


def _depth_ranks(sprites, trajectories, canvas) -> list[int]:
    """Larger frame-0 rasterized area -> higher rank (in front); ties keep the
    lower-index object in front."""
    areas = [_frame0_area(sp, tr, canvas) for sp, tr in zip(sprites, trajectories)]
    order = sorted(range(len(areas)), key=lambda i: (areas[i], -i))
    ranks = [0] * len(areas)
    for rank, i in enumerate(order):
        ranks[i] = rank
    return ranks


def _sample_vmds_sprite(rng: np.random.Generator, scale_index=None, color=None) -> SpriteSpec:
    shape = VMDS_SHAPES[rng.integers(len(VMDS_SHAPES))]
    if scale_index is None:
        scale_index = int(rng.integers(N_SCALES))
    orientation = 2.0 * np.pi * int(rng.integers(N_ORIENTATIONS)) / N_ORIENTATIONS
    if color is None:
        color = tuple(rng.uniform(0.0, 1.0, size=3))
    return SpriteSpec(shape=shape, scale_index=scale_index, orientation=orientation, color=color)


def build_vmds_scene(rng: np.random.Generator, length: int, variant: str = "standard") -> SceneSpec:
    """Build a dSprites-style scene for one of the in-distribution variants.

    standard / small / large draw 1-4 objects; occlusion and same_color
    draw 2-4. small and large pin the scale to its extremes, same_color
    shares one random color across objects, occlusion constrains a pair
    of trajectories to coincide at one frame.
    """
    if variant not in VMDS_VARIANTS:
        raise InvalidParameterError(f"unknown variant {variant!r}")
    if length < 1:
        raise InvalidParameterError(f"length must be >= 1, got {length}")
    lo = 2 if variant in ("occlusion", "same_color") else 1
    n = int(rng.integers(lo, 5))
    forced_scale = {"small": 0, "large": N_SCALES - 1}.get(variant)
    shared_color = tuple(rng.uniform(0.0, 1.0, size=3)) if variant == "same_color" else None
    sprites = [
        _sample_vmds_sprite(rng, scale_index=forced_scale, color=shared_color) for _ in range(n)
    ]
    background = tuple(rng.uniform(0.0, 1.0, size=3))
    params = vmds_gp_params(length)
    crossing = None
    if variant == "occlusion":
        trajectories, crossing = sample_crossing_trajectories(rng, params, n)
    else:
        trajectories = [sample_trajectory(rng, params) for _ in range(n)]
    ranks = _depth_ranks(sprites, trajectories, VMDS_CANVAS)
    objects = tuple(
        ScheduledObject(
            sprite=sp,
            trajectory=tr,
            size_schedule=(sp.scale_index,) * length,
            depth_rank=rk,
        )
        for sp, tr, rk in zip(sprites, trajectories, ranks)
    )
    return SceneSpec(
        objects=objects,
        background_color=background,
        canvas=VMDS_CANVAS,
        length=length,
        crossing=crossing,
    )


def _size_change_schedule(rng: np.random.Generator, length: int) -> tuple[int, ...]:
    start_scale = int(rng.choice([0, N_SCALES - 1]))
    start_frame = int(rng.integers(length))
    step = 1 if start_scale == 0 else -1
    sched = []
    s = start_scale
    for t in range(length):
        sched.append(s)
        if t >= start_frame:
            s = min(max(s + step, 0), N_SCALES - 1)
    return tuple(sched)


def apply_ood_schedule(scene: SceneSpec, kind: str, rng: np.random.Generator) -> SceneSpec:
    """Attach an out-of-distribution transformation schedule to a static scene.

    rotation : constant signed per-frame rotation, magnitude uniform in
        [5, 40] degrees.
    color_change : random initial hue with a constant signed per-frame
        hue delta; saturation and value stay those of the original color.
    size_change : scale starts at an extreme and steps one scale per
        frame toward the opposite extreme from a random start frame,
        clamping at the ends.

    Trajectories are never modified.
    """
    if kind not in OOD_KINDS:
        raise InvalidParameterError(f"unknown OOD kind {kind!r}")
    for obj in scene.objects:
        if obj.rotation_rate != 0.0 or obj.hue_rate != 0.0 or len(set(obj.size_schedule)) != 1:
            raise InvalidParameterError("OOD schedules require a static input scene")
    new_objects = []
    for obj in scene.objects:
        if kind == "rotation":
            magnitude = np.deg2rad(rng.uniform(5.0, 40.0))
            sign = 1.0 if rng.random() < 0.5 else -1.0
            new_objects.append(replace(obj, rotation_rate=float(sign * magnitude)))
        elif kind == "color_change":
            _, s, v = colorsys.rgb_to_hsv(*obj.sprite.color)
            h0 = float(rng.uniform(0.0, 1.0))
            magnitude = rng.uniform(1.0, 10.0) / 360.0
            sign = 1.0 if rng.random() < 0.5 else -1.0
            sprite = replace(obj.sprite, color=colorsys.hsv_to_rgb(h0, s, v))
            new_objects.append(replace(obj, sprite=sprite, hue_rate=float(sign * magnitude)))
        else:  # size_change
            sched = _size_change_schedule(rng, scene.length)
            sprite = replace(obj.sprite, scale_index=sched[0])
            new_objects.append(replace(obj, sprite=sprite, size_schedule=sched))
    return replace(scene, objects=tuple(new_objects))


def build_spmot_scene(rng: np.random.Generator, length: int) -> SceneSpec:
    """Linear-motion sprites on a black background (rendered at 128x128).

    Shapes from a 3-shape set, colors from the fixed 6-color palette,
    constant-velocity trajectories; objects may leave the canvas.
    """
    if length < 1:
        raise InvalidParameterError(f"length must be >= 1, got {length}")
    n = int(rng.integers(1, 5))
    sprites = []
    trajectories = []
    for _ in range(n):
        shape = SPMOT_SHAPES[rng.integers(len(SPMOT_SHAPES))]
        color = SPMOT_PALETTE[rng.integers(len(SPMOT_PALETTE))]
        scale_index = int(rng.integers(N_SCALES))
        orientation = float(rng.uniform(0.0, 2.0 * np.pi))
        sprites.append(
            SpriteSpec(shape=shape, scale_index=scale_index, orientation=orientation, color=color)
        )
        trajectories.append(
            sample_linear_trajectory(rng, length, SPMOT_POSITION_BOUNDS, SPMOT_SPEED_RANGE)
        )
    ranks = _depth_ranks(sprites, trajectories, SPMOT_CANVAS)
    objects = tuple(
        ScheduledObject(
            sprite=sp,
            trajectory=tr,
            size_schedule=(sp.scale_index,) * length,
            depth_rank=rk,
        )
        for sp, tr, rk in zip(sprites, trajectories, ranks)
    )
    return SceneSpec(
        objects=objects,
        background_color=(0.0, 0.0, 0.0),
        canvas=SPMOT_CANVAS,
        length=length,
    )
