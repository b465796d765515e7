"""Sprite rasterization and video rendering.

Frames and ground-truth label maps are produced by point sampling at
pixel centers with hard edges: no anti-aliasing, so every pixel belongs
to exactly one object (or the background). Objects are painted
back-to-front by depth rank, which makes occlusion unambiguous.

Pixel (row r, col c) has its center at continuous coordinates
(x=c, y=r); centroids live in the same coordinate system.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

# Sprite bounding extents for the six discrete scales, in pixels on a
# 64x64 canvas; extents scale proportionally on other canvas sizes.
SCALE_EXTENTS = np.linspace(10.0, 26.0, 6)
N_SCALES = 6
REFERENCE_CANVAS = 64


def _sprite_extent(scale_index: int, canvas: tuple[int, int]) -> float:
    if not 0 <= scale_index < N_SCALES:
        raise InvalidParameterError(f"scale_index must be in [0, {N_SCALES - 1}], got {scale_index}")
    return float(SCALE_EXTENTS[scale_index]) * canvas[0] / REFERENCE_CANVAS


def rasterize_sprite(
    shape: str,
    scale_index: int,
    orientation: float,
    centroid: tuple[float, float],
    canvas: tuple[int, int],
) -> np.ndarray:
    """Binary interior mask of one sprite, sampled at pixel centers.

    Supported shapes: square, ellipse, heart (dSprites-style) and
    circle, triangle (linear-motion sprites). Off-canvas sprites yield
    an all-false mask.
    """
    h, w = canvas
    if h < 1 or w < 1:
        raise InvalidParameterError(f"canvas must be at least 1x1, got {canvas}")
    e = _sprite_extent(scale_index, canvas)
    cx, cy = float(centroid[0]), float(centroid[1])
    yy, xx = np.mgrid[0:h, 0:w]
    dx = xx - cx
    dy = yy - cy
    c, s = np.cos(orientation), np.sin(orientation)
    u = c * dx + s * dy
    v = -s * dx + c * dy

    if shape == "square":
        # Half-open interval per axis so axis-aligned areas are exact.
        half = e / 2.0
        return (u >= -half) & (u < half) & (v >= -half) & (v < half)
    if shape == "ellipse":
        a, b = e / 2.0, e / 4.0
        return (u / a) ** 2 + (v / b) ** 2 <= 1.0
    if shape == "heart":
        # (x^2 + y^2 - 1)^3 - x^2 y^3 <= 0, scaled so the heart's width
        # is close to the sprite extent; y flipped so the heart is upright
        # in image coordinates (rows grow downward).
        xn = u / (0.45 * e)
        yn = -v / (0.45 * e)
        q = xn * xn + yn * yn - 1.0
        return q * q * q - xn * xn * yn * yn * yn <= 0.0
    if shape == "circle":
        r = e / 2.0
        return dx * dx + dy * dy <= r * r
    if shape == "triangle":
        # Equilateral triangle with circumradius e/2, apex pointing up at
        # orientation 0. Inside test via the three edge half-planes.
        r = e / 2.0
        angles = orientation + np.array([np.pi / 2, np.pi / 2 + 2 * np.pi / 3, np.pi / 2 + 4 * np.pi / 3])
        vx = r * np.cos(angles)
        vy = -r * np.sin(angles)  # image y grows downward
        inside = np.ones((h, w), dtype=bool)
        for i in range(3):
            ax, ay = vx[i], vy[i]
            bx, by = vx[(i + 1) % 3], vy[(i + 1) % 3]
            cross = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            inside &= cross <= 0.0
        return inside
    raise InvalidParameterError(f"unknown shape {shape!r}")


def compose_frame(scene, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Render frame t of a scene: (H, W, 3) float pixels and (H, W) label map.

    Objects are painted in ascending depth-rank order, so the front-most
    object covering a pixel determines its color and label. Labels are
    1-based object indices; 0 is background.
    """
    if not 0 <= t < scene.length:
        raise InvalidParameterError(f"frame index {t} outside [0, {scene.length})")
    h, w = scene.canvas
    frame = np.empty((h, w, 3), dtype=float)
    frame[:] = np.asarray(scene.background_color, dtype=float)
    labels = np.zeros((h, w), dtype=np.uint8)
    for obj_idx in sorted(range(len(scene.objects)), key=lambda i: scene.objects[i].depth_rank):
        obj = scene.objects[obj_idx]
        mask = rasterize_sprite(
            obj.sprite.shape,
            obj.scale_at(t),
            obj.orientation_at(t),
            tuple(obj.trajectory.points[t]),
            scene.canvas,
        )
        frame[mask] = obj.color_at(t)
        labels[mask] = obj_idx + 1
    return frame, labels


def downsample_frame(frame: np.ndarray, factor: int) -> np.ndarray:
    """Box-average an (H, W, ...) float image over factor x factor blocks."""
    if factor == 1:
        return frame.copy()
    h, w = frame.shape[:2]
    if h % factor or w % factor:
        raise InvalidParameterError(
            f"dimensions {h}x{w} not divisible by downsample factor {factor}"
        )
    blocked = frame.reshape(h // factor, factor, w // factor, factor, *frame.shape[2:])
    return blocked.mean(axis=(1, 3))


def downsample_labels(labels: np.ndarray, factor: int, priority: np.ndarray) -> np.ndarray:
    """Majority-vote downsampling of a label map.

    `priority[label]` breaks ties: the higher-priority (front-most) label
    wins, and the background (priority 0) loses all ties against objects.
    """
    if factor == 1:
        return labels.copy()
    h, w = labels.shape
    if h % factor or w % factor:
        raise InvalidParameterError(
            f"dimensions {h}x{w} not divisible by downsample factor {factor}"
        )
    priority = np.asarray(priority, dtype=np.int64)
    n_labels = priority.shape[0]
    if labels.max() >= n_labels:
        raise InvalidParameterError("priority array does not cover all labels present")
    hh, ww = h // factor, w // factor
    blocks = labels.reshape(hh, factor, ww, factor).transpose(0, 2, 1, 3).reshape(-1, factor * factor)
    counts = np.zeros((blocks.shape[0], n_labels), dtype=np.int64)
    rows = np.repeat(np.arange(blocks.shape[0]), factor * factor)
    np.add.at(counts, (rows, blocks.ravel()), 1)
    # Majority with tie-break by priority: scale counts so any count
    # difference dominates any priority difference.
    score = counts * (priority.max() + 2) + priority[None, :]
    out = np.argmax(score, axis=1).astype(labels.dtype)
    return out.reshape(hh, ww)


def downsample(array: np.ndarray, factor: int, label_priority: np.ndarray | None = None) -> np.ndarray:
    """Dispatch to frame or label-map downsampling based on `label_priority`."""
    if factor < 1:
        raise InvalidParameterError(f"factor must be >= 1, got {factor}")
    if label_priority is not None:
        return downsample_labels(array, factor, label_priority)
    return downsample_frame(array, factor)


@dataclass
class VideoSample:
    """A rendered video: frames, ground-truth label maps, visibility, provenance.

    frames : (T, H, W, 3) uint8.
    labels : (T, H, W) uint8; 0 = background, k = object k-1 of the scene.
    visibility : (n_objects, T) bool; True iff the object's mask is nonempty.
    """

    frames: np.ndarray
    labels: np.ndarray
    visibility: np.ndarray
    scene: object
    seed_info: dict | None = None

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def n_objects(self) -> int:
        return self.visibility.shape[0]


def label_priority(scene) -> np.ndarray:
    """Priority array for downsample_labels: background 0, then 1 + depth rank."""
    prio = np.zeros(len(scene.objects) + 1, dtype=np.int64)
    for i, obj in enumerate(scene.objects):
        prio[i + 1] = 1 + obj.depth_rank
    return prio


def render_video(scene, downsample_factor: int = 1, seed_info: dict | None = None) -> VideoSample:
    """Render every frame of a scene into a VideoSample.

    Frames are quantized to 8-bit after optional box-average
    downsampling; label maps are downsampled by majority vote with
    depth-priority tie-breaks. Visibility is derived from the final
    (possibly downsampled) label maps.
    """
    prio = label_priority(scene)
    frames = []
    labels = []
    for t in range(scene.length):
        frame, lab = compose_frame(scene, t)
        if downsample_factor > 1:
            frame = downsample_frame(frame, downsample_factor)
            lab = downsample_labels(lab, downsample_factor, prio)
        frames.append(np.round(np.clip(frame, 0.0, 1.0) * 255.0).astype(np.uint8))
        labels.append(lab)
    frames_arr = np.stack(frames)
    labels_arr = np.stack(labels)
    n = len(scene.objects)
    visibility = np.zeros((n, scene.length), dtype=bool)
    for t in range(scene.length):
        present = np.unique(labels_arr[t])
        for k in present:
            if k > 0:
                visibility[k - 1, t] = True
    return VideoSample(
        frames=frames_arr,
        labels=labels_arr,
        visibility=visibility,
        scene=scene,
        seed_info=seed_info,
    )
