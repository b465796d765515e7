"""Tracking metric accumulation and computation.

Per-frame match events are folded into value-like, mergeable
`SequenceStats`, from which the metric suite is computed:

* MOTA = 1 - (misses + false positives + ID switches) / object occurrences
* MOTP = mean IoU over all matched pairs
* MD / MT = fraction of objects matched in >= 80% of their visible
  frames; MT additionally requires zero ID switches
* Match / Miss / ID S. / FP fractions of object occurrences
* MSE of reconstructed frames (optional)

Evaluation windows implement warm starts: matching runs over all frames
so correspondence memory flows through the warm-start prefix, but events
are only counted for frames inside the window.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, UndefinedMetricError
from .matcher import (
    CorrespondenceState,
    FrameMatchResult,
    MatchConfig,
    exclude_background,
    match_frame,
)

LIFESPAN_THRESHOLD = 0.8


@dataclass
class ObjectRecord:
    """Window-restricted track record for one ground-truth object."""

    gt_id: int
    visible_frames: int = 0
    matched_frames: int = 0
    switches: int = 0


@dataclass
class SequenceStats:
    """Accumulated event counts; mergeable across sequences."""

    misses_total: int = 0
    fps_total: int = 0
    switches_total: int = 0
    objects_total: int = 0
    matches_total: int = 0
    iou_sum: float = 0.0
    object_records: list[ObjectRecord] = field(default_factory=list)
    mse_sum: float = 0.0
    mse_count: int = 0
    object_count: int | None = None  # gt objects in the scene, for breakdowns
    _index: dict[int, ObjectRecord] = field(default_factory=dict, repr=False)

    def _record(self, gt_id: int) -> ObjectRecord:
        rec = self._index.get(gt_id)
        if rec is None:
            rec = ObjectRecord(gt_id)
            self._index[gt_id] = rec
            self.object_records.append(rec)
        return rec


def accumulate(
    stats: SequenceStats,
    frame_result: FrameMatchResult,
    frame_index: int,
    eval_window: tuple[int, int] | None = None,
) -> SequenceStats:
    """Fold one frame's match result into the stats (in place).

    Frames outside ``eval_window`` (a half-open [start, end) index range)
    contribute nothing; matching state still advances outside because
    the caller runs the matcher on every frame.
    """
    if eval_window is not None:
        start, end = eval_window
        if not start <= frame_index < end:
            return stats
    stats.objects_total += frame_result.n_visible_gt
    stats.matches_total += len(frame_result.pairs)
    stats.misses_total += len(frame_result.misses)
    stats.fps_total += len(frame_result.false_positives)
    stats.switches_total += len(frame_result.id_switches)
    for gt_id, _, pair_iou in frame_result.pairs:
        stats.iou_sum += pair_iou
        rec = stats._record(gt_id)
        rec.visible_frames += 1
        rec.matched_frames += 1
        if gt_id in frame_result.id_switches:
            rec.switches += 1
    for gt_id in frame_result.misses:
        stats._record(gt_id).visible_frames += 1
    return stats


def accumulate_mse(stats: SequenceStats, reconstructions: np.ndarray, frames: np.ndarray) -> SequenceStats:
    """Add squared reconstruction error over all pixels/channels/frames."""
    recon = np.asarray(reconstructions, dtype=float)
    ref = np.asarray(frames, dtype=float)
    if recon.shape != ref.shape:
        raise InvalidParameterError(f"shape mismatch: {recon.shape} vs {ref.shape}")
    stats.mse_sum += float(np.square(recon - ref).sum())
    stats.mse_count += recon.size
    return stats


def merge(a: SequenceStats, b: SequenceStats) -> SequenceStats:
    """Componentwise sum of stats from disjoint sequences."""
    records = [
        ObjectRecord(r.gt_id, r.visible_frames, r.matched_frames, r.switches)
        for r in a.object_records + b.object_records
    ]
    return SequenceStats(
        misses_total=a.misses_total + b.misses_total,
        fps_total=a.fps_total + b.fps_total,
        switches_total=a.switches_total + b.switches_total,
        objects_total=a.objects_total + b.objects_total,
        matches_total=a.matches_total + b.matches_total,
        iou_sum=a.iou_sum + b.iou_sum,
        object_records=records,
        mse_sum=a.mse_sum + b.mse_sum,
        mse_count=a.mse_count + b.mse_count,
        object_count=a.object_count if a.object_count == b.object_count else None,
    )


def mota(stats: SequenceStats) -> float:
    if stats.objects_total == 0:
        raise UndefinedMetricError("MOTA undefined: no object occurrences")
    failures = stats.misses_total + stats.fps_total + stats.switches_total
    return 1.0 - failures / stats.objects_total


def motp(stats: SequenceStats) -> float:
    if stats.matches_total == 0:
        raise UndefinedMetricError("MOTP undefined: no matches")
    return stats.iou_sum / stats.matches_total


def md_mt(stats: SequenceStats, lifespan_threshold: float = LIFESPAN_THRESHOLD) -> tuple[float, float]:
    """Mostly-detected and mostly-tracked fractions.

    An object counts toward MD when matched in at least
    ``lifespan_threshold`` of its visible frames; toward MT when it
    additionally had zero ID switches. Objects never visible inside the
    window are excluded from both denominators.
    """
    eligible = [r for r in stats.object_records if r.visible_frames > 0]
    if not eligible:
        raise UndefinedMetricError("MD/MT undefined: no visible objects")
    md_n = sum(1 for r in eligible if r.matched_frames >= lifespan_threshold * r.visible_frames)
    mt_n = sum(
        1
        for r in eligible
        if r.matched_frames >= lifespan_threshold * r.visible_frames and r.switches == 0
    )
    return md_n / len(eligible), mt_n / len(eligible)


def failure_fractions(stats: SequenceStats) -> tuple[float, float, float, float]:
    """(match, miss, ID switch, FP) counts over total object occurrences."""
    if stats.objects_total == 0:
        raise UndefinedMetricError("fractions undefined: no object occurrences")
    n = stats.objects_total
    return (
        stats.matches_total / n,
        stats.misses_total / n,
        stats.switches_total / n,
        stats.fps_total / n,
    )


def mse(reconstructions: np.ndarray, frames: np.ndarray) -> float:
    """Mean squared difference over all pixels, channels and frames."""
    recon = np.asarray(reconstructions, dtype=float)
    ref = np.asarray(frames, dtype=float)
    if recon.shape != ref.shape:
        raise InvalidParameterError(f"shape mismatch: {recon.shape} vs {ref.shape}")
    return float(np.square(recon - ref).mean())


@dataclass
class MetricsReport:
    """Computed metric suite; None marks an unavailable (0/0) value."""

    mota: float | None
    motp: float | None
    md: float | None
    mt: float | None
    match_frac: float | None
    miss_frac: float | None
    idsw_frac: float | None
    fp_frac: float | None
    mse: float | None = None
    breakdowns: dict[int, dict[str, float]] = field(default_factory=dict)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except UndefinedMetricError:
        return None


def compute_report(stats: SequenceStats, breakdowns: dict[int, dict[str, float]] | None = None) -> MetricsReport:
    """Assemble the full report from merged stats, tolerating 0/0 cases."""
    md_mt_val = _maybe(md_mt, stats)
    fracs = _maybe(failure_fractions, stats)
    return MetricsReport(
        mota=_maybe(mota, stats),
        motp=_maybe(motp, stats),
        md=md_mt_val[0] if md_mt_val else None,
        mt=md_mt_val[1] if md_mt_val else None,
        match_frac=fracs[0] if fracs else None,
        miss_frac=fracs[1] if fracs else None,
        idsw_frac=fracs[2] if fracs else None,
        fp_frac=fracs[3] if fracs else None,
        mse=stats.mse_sum / stats.mse_count if stats.mse_count else None,
        breakdowns=breakdowns or {},
    )


def breakdown_by_object_count(per_sequence: list[SequenceStats]) -> dict[int, dict[str, float]]:
    """Failure fractions grouped by the number of objects in each sequence."""
    groups: dict[int, SequenceStats] = {}
    for stats in per_sequence:
        if stats.object_count is None:
            raise InvalidParameterError("breakdown requires per-sequence object counts")
        if stats.object_count in groups:
            groups[stats.object_count] = merge(groups[stats.object_count], stats)
        else:
            groups[stats.object_count] = stats
    out: dict[int, dict[str, float]] = {}
    for count in sorted(groups):
        fracs = _maybe(failure_fractions, groups[count])
        if fracs is None:
            continue
        out[count] = {
            "match": fracs[0],
            "miss": fracs[1],
            "id_switch": fracs[2],
            "false_positive": fracs[3],
        }
    return out


def label_map_to_masks(labels: np.ndarray, exclude: set[int] = frozenset()) -> dict[int, np.ndarray]:
    """Split an integer label map into {id: boolean mask}, skipping 0."""
    masks = {}
    for value in np.unique(labels):
        v = int(value)
        if v == 0 or v in exclude:
            continue
        masks[v] = labels == value
    return masks


def evaluate_sequence(
    gt_labels: np.ndarray,
    pred_labels: np.ndarray,
    config: MatchConfig = MatchConfig(),
    eval_window: tuple[int, int] | None = None,
    background_labels: set[int] = frozenset(),
    object_count: int | None = None,
) -> SequenceStats:
    """Match and accumulate a whole sequence of (T, H, W) label maps.

    ``background_labels`` name ground-truth labels that are background
    segments: they are removed from the ground-truth object set and used
    for background exclusion of predictions, together with the implicit
    unlabeled (0) region.
    """
    gt_labels = np.asarray(gt_labels)
    pred_labels = np.asarray(pred_labels)
    if gt_labels.shape != pred_labels.shape:
        raise InvalidParameterError(
            f"gt/pred shape mismatch: {gt_labels.shape} vs {pred_labels.shape}"
        )
    stats = SequenceStats(object_count=object_count)
    state = CorrespondenceState()
    exclude = set(background_labels)
    for t in range(gt_labels.shape[0]):
        gt_masks = label_map_to_masks(gt_labels[t], exclude=exclude)
        bg_masks = [gt_labels[t] == 0]
        bg_masks += [gt_labels[t] == b for b in sorted(exclude)]
        pred_masks = label_map_to_masks(pred_labels[t])
        pred_masks = exclude_background(pred_masks, bg_masks, config.background_iou_threshold)
        result, state = match_frame(state, gt_masks, pred_masks, config)
        accumulate(stats, result, t, eval_window)
    return stats
