import numpy as np
import pytest

from objmot.errors import InvalidParameterError, UndefinedMetricError
from objmot.matcher import FrameMatchResult, MatchConfig
from objmot.metrics import (
    SequenceStats,
    accumulate,
    breakdown_by_object_count,
    compute_report,
    evaluate_sequence,
    failure_fractions,
    md_mt,
    merge,
    mota,
    motp,
    mse,
)
from objmot.seeding import rng_for
from reference import ref_evaluate


def make_stats(**kwargs):
    s = SequenceStats()
    for k, v in kwargs.items():
        setattr(s, k, v)
    return s


def random_label_sequence(rng, frames, shape, max_objects):
    """Random disjoint-mask label maps built by painting rectangles."""
    seq = np.zeros((frames, *shape), dtype=np.uint8)
    for t in range(frames):
        for k in range(1, max_objects + 1):
            if rng.random() < 0.2:
                continue  # occasionally absent
            h, w = shape
            r0 = int(rng.integers(0, h - 3))
            c0 = int(rng.integers(0, w - 3))
            r1 = int(rng.integers(r0 + 2, min(r0 + 8, h) + 1))
            c1 = int(rng.integers(c0 + 2, min(c0 + 8, w) + 1))
            region = seq[t, r0:r1, c0:c1]
            region[region == 0] = k
    return seq


def perturb_predictions(rng, gt_seq, max_objects):
    """Predictions derived from gt: jitter, dropouts, relabels, spurious."""
    pred = np.zeros_like(gt_seq)
    relabel = {k: int(rng.integers(1, max_objects + 3)) for k in range(1, max_objects + 1)}
    for t in range(gt_seq.shape[0]):
        for k in range(1, max_objects + 1):
            mask = gt_seq[t] == k
            if not mask.any() or rng.random() < 0.15:
                continue
            dr, dc = int(rng.integers(-1, 2)), int(rng.integers(-1, 2))
            shifted = np.roll(np.roll(mask, dr, axis=0), dc, axis=1)
            label = relabel[k] if rng.random() < 0.2 else k
            region = pred[t]
            shifted &= region == 0
            region[shifted] = label
        if rng.random() < 0.2:
            r, c = int(rng.integers(0, gt_seq.shape[1])), int(rng.integers(0, gt_seq.shape[2]))
            if pred[t, r, c] == 0:
                pred[t, r, c] = max_objects + 5
    return pred


def test_mota_hand_enumeration():
    stats = make_stats(objects_total=10, misses_total=1, fps_total=1, switches_total=0)
    assert mota(stats) == pytest.approx(0.8)


def test_mota_negative_allowed():
    stats = make_stats(objects_total=10, fps_total=12)
    assert mota(stats) == pytest.approx(-0.2)


def test_mota_zero_failures_and_undefined():
    assert mota(make_stats(objects_total=5)) == 1.0
    with pytest.raises(UndefinedMetricError):
        mota(SequenceStats())


def test_motp_mean_and_floor():
    stats = make_stats(matches_total=2, iou_sum=1.4)
    assert motp(stats) == pytest.approx(0.7)
    with pytest.raises(UndefinedMetricError):
        motp(SequenceStats())


def test_md_mt_thresholds():
    from objmot.metrics import ObjectRecord

    stats = SequenceStats()
    stats.object_records = [
        ObjectRecord(1, visible_frames=10, matched_frames=8, switches=0),   # MD and MT
        ObjectRecord(2, visible_frames=10, matched_frames=10, switches=1),  # MD only
        ObjectRecord(3, visible_frames=10, matched_frames=7, switches=0),   # neither
        ObjectRecord(4, visible_frames=0),                                  # excluded
    ]
    md, mt = md_mt(stats)
    assert md == pytest.approx(2 / 3)
    assert mt == pytest.approx(1 / 3)
    with pytest.raises(UndefinedMetricError):
        md_mt(SequenceStats())


def test_failure_fractions_partition():
    stats = make_stats(objects_total=20, matches_total=17, misses_total=3,
                       switches_total=2, fps_total=25)
    match_f, miss_f, idsw_f, fp_f = failure_fractions(stats)
    assert match_f + miss_f == pytest.approx(1.0)
    assert fp_f > 1.0  # FPs unbounded


def test_mse_values():
    zeros = np.zeros((2, 4, 4, 3))
    ones = np.ones_like(zeros)
    assert mse(zeros, zeros) == 0.0
    assert mse(zeros, ones) == 1.0
    half = zeros.copy()
    half.reshape(-1)[: half.size // 2] = 0.5
    assert mse(half, zeros) == pytest.approx(0.125)
    with pytest.raises(InvalidParameterError):
        mse(zeros, np.zeros((2, 4, 4)))


def test_merge_identity_commutative_associative():
    rng = rng_for(12, "merge")
    seqs = []
    for i in range(3):
        gt = random_label_sequence(rng, 4, (12, 12), 2)
        pred = perturb_predictions(rng, gt, 2)
        seqs.append(evaluate_sequence(gt, pred, object_count=2))
    a, b, c = seqs

    def key(s):
        return (s.misses_total, s.fps_total, s.switches_total, s.objects_total,
                s.matches_total, s.iou_sum,
                sorted((r.gt_id, r.visible_frames, r.matched_frames, r.switches)
                       for r in s.object_records))

    zero = SequenceStats()
    assert key(merge(a, zero)) == key(a)
    assert key(merge(a, b)) == key(merge(b, a))
    assert key(merge(merge(a, b), c)) == key(merge(a, merge(b, c)))


def test_accumulate_windowing():
    full = SequenceStats()
    windowed = SequenceStats()
    result = FrameMatchResult(pairs=[(1, 1, 0.9)], misses={2}, false_positives={9})
    for t in range(4):
        accumulate(full, result, t, (0, 4))
        accumulate(windowed, result, t, (2, 4))
    assert full.objects_total == 8 and windowed.objects_total == 4
    assert full.misses_total == 4 and windowed.misses_total == 2
    assert full.fps_total == 4 and windowed.fps_total == 2
    # Window covering everything equals unwindowed accumulation.
    unwindowed = SequenceStats()
    for t in range(4):
        accumulate(unwindowed, result, t, None)
    assert unwindowed.objects_total == full.objects_total
    assert unwindowed.iou_sum == full.iou_sum


def test_accumulate_empty_result_noop_counts():
    stats = SequenceStats()
    accumulate(stats, FrameMatchResult(), 0, None)
    assert stats.objects_total == 0 and stats.matches_total == 0


def test_breakdown_by_object_count():
    rng = rng_for(14, "breakdown")
    per_seq = []
    for count in (2, 2, 3):
        gt = random_label_sequence(rng, 3, (12, 12), count)
        per_seq.append(evaluate_sequence(gt, gt.copy(), object_count=count))
    groups = breakdown_by_object_count(per_seq)
    assert set(groups) == {2, 3}
    merged_2 = merge(per_seq[0], per_seq[1])
    fracs = failure_fractions(merged_2)
    assert groups[2]["match"] == pytest.approx(fracs[0])
    assert breakdown_by_object_count([]) == {}


def test_report_unavailable_values():
    report = compute_report(SequenceStats())
    assert report.mota is None and report.motp is None
    assert report.md is None and report.mt is None


def test_engine_matches_reference_on_micro_sequences():
    # Engine vs independent brute-force enumerator, 200 seeded cases.
    rng = rng_for(2025, "micro")
    for case in range(200):
        n_obj = int(rng.integers(1, 4))
        frames = int(rng.integers(1, 6))
        gt = random_label_sequence(rng, frames, (16, 16), n_obj)
        pred = perturb_predictions(rng, gt, n_obj)
        stats = evaluate_sequence(gt, pred, MatchConfig(), object_count=n_obj)
        ref = ref_evaluate(gt, pred)
        assert stats.objects_total == ref["objects"], case
        assert stats.misses_total == ref["misses"], case
        assert stats.fps_total == ref["fps"], case
        assert stats.switches_total == ref["switches"], case
        for engine_val, ref_val in (
            (None if stats.objects_total == 0 else mota(stats), ref["mota"]),
            (None if stats.matches_total == 0 else motp(stats), ref["motp"]),
        ):
            if ref_val is None:
                assert engine_val is None
            else:
                assert engine_val == pytest.approx(ref_val, abs=1e-12)
        if ref["md"] is not None:
            md, mt = md_mt(stats)
            assert md == pytest.approx(ref["md"], abs=1e-12)
            assert mt == pytest.approx(ref["mt"], abs=1e-12)


def test_motp_floor_with_matches():
    rng = rng_for(77, "floor")
    for _ in range(30):
        gt = random_label_sequence(rng, 4, (16, 16), 3)
        pred = perturb_predictions(rng, gt, 3)
        stats = evaluate_sequence(gt, pred)
        if stats.matches_total > 0:
            assert motp(stats) >= 0.5


def test_global_relabel_leaves_metrics_unchanged():
    rng = rng_for(99, "relabel")
    gt = random_label_sequence(rng, 5, (16, 16), 3)
    pred = perturb_predictions(rng, gt, 3)
    mapping = np.zeros(256, dtype=np.uint8)
    for v in np.unique(pred):
        mapping[v] = v + 100 if v else 0
    relabeled = mapping[pred]
    a = evaluate_sequence(gt, pred)
    b = evaluate_sequence(gt, relabeled)
    assert (a.misses_total, a.fps_total, a.switches_total, a.matches_total) == (
        b.misses_total, b.fps_total, b.switches_total, b.matches_total)
    assert a.iou_sum == pytest.approx(b.iou_sum, abs=1e-12)
