"""Per-frame correspondence between ground-truth and predicted masks.

The matching protocol per frame:

1. background exclusion: predicted masks overlapping a ground-truth
   background segment with IoU strictly above the background threshold
   are dropped;
2. carry-over: a ground-truth object keeps its most recently matched
   hypothesis whenever that pair's current IoU still clears the match
   threshold, even if another hypothesis overlaps better;
3. optimal assignment: remaining objects and hypotheses are paired by a
   maximum-total-IoU assignment restricted to pairs at or above the
   threshold;
4. bookkeeping: a matched object whose hypothesis differs from its most
   recent one is an ID switch; unmatched visible objects are misses,
   unmatched hypotheses are false positives.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidParameterError

# Perturbation used to break ties among equally-scoring assignments
# toward low row-major indices; far below any meaningful IoU difference.
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class MatchConfig:
    iou_threshold: float = 0.5
    background_iou_threshold: float = 0.2

    def __post_init__(self):
        for name, v in (("iou_threshold", self.iou_threshold),
                        ("background_iou_threshold", self.background_iou_threshold)):
            if not 0.0 < v <= 1.0:
                raise InvalidParameterError(f"{name} must be in (0, 1], got {v}")


@dataclass
class FrameMatchResult:
    """Match outcome for a single frame."""

    pairs: list[tuple[int, int, float]] = field(default_factory=list)  # (gt id, hyp id, iou)
    misses: set[int] = field(default_factory=set)
    false_positives: set[int] = field(default_factory=set)
    id_switches: set[int] = field(default_factory=set)

    @property
    def n_visible_gt(self) -> int:
        return len(self.pairs) + len(self.misses)


@dataclass
class CorrespondenceState:
    """Most recent matched hypothesis per ground-truth id.

    Persisted across full-occlusion gaps: re-association to a different
    hypothesis after reappearance counts as an ID switch.
    """

    last_hypothesis: dict[int, int] = field(default_factory=dict)


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two binary masks; 0 when both are empty."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise InvalidParameterError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 0.0
    return float(np.logical_and(a, b).sum() / union)


def exclude_background(
    pred_masks: dict[int, np.ndarray],
    background_masks: list[np.ndarray],
    threshold: float = 0.2,
) -> dict[int, np.ndarray]:
    """Drop predictions overlapping any background segment with IoU > threshold."""
    if not background_masks:
        return dict(pred_masks)
    kept = {}
    for hyp_id, mask in pred_masks.items():
        if any(iou(mask, bg) > threshold for bg in background_masks):
            continue
        kept[hyp_id] = mask
    return kept


def hungarian(scores: np.ndarray, min_score: float) -> list[tuple[int, int]]:
    """Maximum-total-score one-to-one partial assignment.

    Only entries >= min_score are assignable. Among equally optimal
    assignments, ties break deterministically toward low row-major cell
    indices. Scores must be finite and non-negative; min_score > 0.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        return []
    if not np.all(np.isfinite(scores)):
        raise InvalidParameterError("scores must be finite")
    if min_score <= 0.0:
        raise InvalidParameterError(f"min_score must be positive, got {min_score}")
    n_rows, n_cols = scores.shape
    valid = scores >= min_score
    if not valid.any():
        return []
    idx = np.arange(n_rows * n_cols, dtype=float).reshape(n_rows, n_cols)
    effective = np.where(valid, scores + _TIE_EPS * (n_rows * n_cols - idx), 0.0)
    rows, cols = linear_sum_assignment(effective, maximize=True)
    return sorted((int(r), int(c)) for r, c in zip(rows, cols) if valid[r, c])


def _check_disjoint(masks: dict[int, np.ndarray], side: str):
    if len(masks) < 2:
        return
    total = None
    overlap = False
    for m in masks.values():
        m = np.asarray(m, dtype=bool)
        if total is None:
            total = m.copy()
        else:
            if np.logical_and(total, m).any():
                overlap = True
                break
            total |= m
    if overlap:
        raise InvalidParameterError(f"{side} masks overlap within one frame")


def match_frame(
    state: CorrespondenceState,
    gt_masks: dict[int, np.ndarray],
    pred_masks: dict[int, np.ndarray],
    config: MatchConfig = MatchConfig(),
) -> tuple[FrameMatchResult, CorrespondenceState]:
    """Match one frame's masks and update the correspondence state.

    Empty masks on either side are ignored entirely: a fully occluded
    ground-truth object is neither matched nor missed, and an empty
    prediction is not a false positive.
    """
    gt_masks = {k: np.asarray(m, dtype=bool) for k, m in gt_masks.items()}
    pred_masks = {k: np.asarray(m, dtype=bool) for k, m in pred_masks.items()}
    _check_disjoint(gt_masks, "ground-truth")
    _check_disjoint(pred_masks, "prediction")

    visible_gt = {k: m for k, m in gt_masks.items() if m.any()}
    live_pred = {k: m for k, m in pred_masks.items() if m.any()}

    result = FrameMatchResult()
    matched_gt: set[int] = set()
    matched_hyp: set[int] = set()

    # Stage 1: carry over remembered correspondences that still clear the
    # threshold, in ground-truth id order.
    for gt_id in sorted(visible_gt):
        hyp_id = state.last_hypothesis.get(gt_id)
        if hyp_id is None or hyp_id not in live_pred or hyp_id in matched_hyp:
            continue
        score = iou(visible_gt[gt_id], live_pred[hyp_id])
        if score >= config.iou_threshold:
            result.pairs.append((gt_id, hyp_id, score))
            matched_gt.add(gt_id)
            matched_hyp.add(hyp_id)

    # Stage 2: optimal assignment over the remainder.
    rem_gt = sorted(k for k in visible_gt if k not in matched_gt)
    rem_hyp = sorted(k for k in live_pred if k not in matched_hyp)
    if rem_gt and rem_hyp:
        scores = np.array(
            [[iou(visible_gt[g], live_pred[h]) for h in rem_hyp] for g in rem_gt]
        )
        for r, c in hungarian(scores, config.iou_threshold):
            gt_id, hyp_id = rem_gt[r], rem_hyp[c]
            result.pairs.append((gt_id, hyp_id, float(scores[r, c])))
            matched_gt.add(gt_id)
            matched_hyp.add(hyp_id)

    result.pairs.sort()

    # Stage 3: events and state update.
    new_state = CorrespondenceState(dict(state.last_hypothesis))
    for gt_id, hyp_id, _ in result.pairs:
        previous = state.last_hypothesis.get(gt_id)
        if previous is not None and previous != hyp_id:
            result.id_switches.add(gt_id)
        new_state.last_hypothesis[gt_id] = hyp_id
    result.misses = set(visible_gt) - matched_gt
    result.false_positives = set(live_pred) - matched_hyp
    return result, new_state
