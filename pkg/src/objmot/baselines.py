"""Non-learned reference trackers.

The oracle tracker replays ground truth and pins the top of every
metric; the color tracker is a deliberately naive background-subtraction
baseline whose documented failure modes (merging same-colored touching
objects, losing occluded objects) exercise the failure-counting paths.
"""

import numpy as np
from scipy import ndimage

from .matcher import iou

COLOR_DISTANCE_THRESHOLD = 0.15
LINK_IOU_THRESHOLD = 0.3


def oracle_tracker(gt_labels: np.ndarray) -> np.ndarray:
    """Emit the ground-truth label maps verbatim as predictions."""
    return np.asarray(gt_labels).copy()


def estimate_background(frames: np.ndarray) -> np.ndarray:
    """Per-pixel temporal median color over the sequence, in [0, 1]."""
    f = np.asarray(frames, dtype=float)
    if f.max() > 1.0:
        f = f / 255.0
    return np.median(f, axis=0)


def color_tracker(
    frames: np.ndarray,
    background: np.ndarray | str = "median",
    color_threshold: float = COLOR_DISTANCE_THRESHOLD,
    link_iou: float = LINK_IOU_THRESHOLD,
) -> np.ndarray:
    """Background-subtraction tracker with greedy IoU linking.

    Pixels farther than `color_threshold` (Euclidean RGB) from the
    background estimate are foreground; 4-connected components become
    hypotheses. Components are linked to the previous frame's
    hypotheses greedily by highest mask IoU (>= `link_iou`); unlinked
    components receive fresh ids.
    """
    f = np.asarray(frames, dtype=float)
    if f.max() > 1.0:
        f = f / 255.0
    if isinstance(background, str):
        if background == "median":
            bg = estimate_background(f)
        elif background == "black":
            bg = np.zeros_like(f[0])
        else:
            raise ValueError(f"unknown background estimator {background!r}")
    else:
        bg = np.asarray(background, dtype=float)

    out = np.zeros(f.shape[:3], dtype=np.uint8)
    prev_masks: dict[int, np.ndarray] = {}
    next_id = 1
    for t in range(f.shape[0]):
        fg = np.linalg.norm(f[t] - bg, axis=-1) > color_threshold
        comp_map, n_comp = ndimage.label(fg)
        comps = [comp_map == c for c in range(1, n_comp + 1)]

        candidates = []
        for ci, comp in enumerate(comps):
            for hyp_id, prev in prev_masks.items():
                score = iou(comp, prev)
                if score >= link_iou:
                    candidates.append((score, ci, hyp_id))
        candidates.sort(key=lambda item: (-item[0], item[1], item[2]))
        assigned_comp: dict[int, int] = {}
        used_hyp: set[int] = set()
        for score, ci, hyp_id in candidates:
            if ci in assigned_comp or hyp_id in used_hyp:
                continue
            assigned_comp[ci] = hyp_id
            used_hyp.add(hyp_id)
        frame_masks: dict[int, np.ndarray] = {}
        for ci, comp in enumerate(comps):
            hyp_id = assigned_comp.get(ci)
            if hyp_id is None:
                hyp_id = next_id
                next_id += 1
            out[t][comp] = hyp_id
            frame_masks[hyp_id] = comp
        prev_masks = frame_masks
    return out
