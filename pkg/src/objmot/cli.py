"""Command-line front end: generate, track, evaluate.

Exit codes: 0 success, 2 usage error, 3 validation error,
4 generation / numerical failure.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import baselines, datasets, metrics, storage
from .errors import (
    GenerationExhaustedError,
    InvalidParameterError,
    NumericalError,
    ValidationError,
)
from .matcher import MatchConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

SEED_ENV_VAR = "OBJMOT_SEED"


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="objmot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a dataset on disk")
    gen.add_argument("--family", choices=datasets.FAMILIES, required=True)
    gen.add_argument("--variant", choices=datasets.ALL_VARIANTS, default="standard")
    gen.add_argument("--split", choices=datasets.SPLITS, default="test")
    gen.add_argument("--num", type=int, default=None, help="override sequence count")
    gen.add_argument("--length", type=int, default=None, help="override sequence length")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--black-background", action="store_true")
    gen.add_argument("--workers", type=int, default=1)

    trk = sub.add_parser("track", help="run a baseline tracker over a dataset")
    trk.add_argument("--baseline", choices=("oracle", "color"), required=True)
    trk.add_argument("--data", type=Path, required=True)
    trk.add_argument("--out", type=Path, required=True)
    trk.add_argument("--background", choices=("median", "black"), default="median",
                     help="background estimate for the color baseline")
    trk.add_argument("--workers", type=int, default=1)

    ev = sub.add_parser("evaluate", help="evaluate predictions against ground truth")
    ev.add_argument("--gt", type=Path, required=True)
    ev.add_argument("--pred", type=Path, required=True)
    ev.add_argument("--iou", type=float, default=0.5)
    ev.add_argument("--bg-iou", type=float, default=0.2)
    ev.add_argument("--eval-start", type=int, default=0,
                    help="count events from this frame on; matching still runs from frame 0")
    ev.add_argument("--breakdown", choices=("object-count",), default=None)
    ev.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    ev.add_argument("--out", type=Path, default=None, help="report file (default: stdout only)")
    return parser


def _generate_one(args) -> tuple[int, str]:
    config, index, out = args
    sample = datasets.generate_sequence(config, index)
    digest = storage.write_sequence(sample, out, index)
    return index, digest


def cmd_generate(args) -> int:
    config = datasets.default_config(
        args.family,
        args.variant,
        args.split,
        seed=_default_seed() if args.seed is None else args.seed,
        black_background=args.black_background,
    )
    overrides = {}
    if args.num is not None:
        overrides["num_sequences"] = args.num
    if args.length is not None:
        overrides["length"] = args.length
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [(config, i, args.out) for i in range(config.num_sequences)]
    digests: list[str] = [""] * config.num_sequences
    if args.workers > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for index, digest in pool.map(_generate_one, jobs):
                digests[index] = digest
    else:
        for job in jobs:
            index, digest = _generate_one(job)
            digests[index] = digest
    storage.write_manifest_from_digests(args.out, digests, config)
    print(f"wrote {config.num_sequences} sequences to {args.out}")
    return EXIT_OK


def _track_one(args) -> int:
    data, out, baseline, background, index = args
    seq = storage.read_sequence(data, index)
    if baseline == "oracle":
        pred = baselines.oracle_tracker(seq.labels)
    else:
        pred = baselines.color_tracker(seq.frames, background=background)
    storage.write_prediction_sequence(out, index, pred)
    return index


def cmd_track(args) -> int:
    manifest = storage.read_manifest(args.data)
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [(args.data, args.out, args.baseline, args.background, e["index"])
            for e in manifest["sequences"]]
    if args.workers > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            list(pool.map(_track_one, jobs))
    else:
        for job in jobs:
            _track_one(job)
    extra = None
    if args.baseline == "color":
        extra = {"color_threshold": baselines.COLOR_DISTANCE_THRESHOLD,
                 "link_iou": baselines.LINK_IOU_THRESHOLD,
                 "background": args.background}
    storage.write_prediction_meta(args.out, producer=f"baseline-{args.baseline}", extra=extra)
    print(f"wrote predictions for {len(jobs)} sequences to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if not 0.0 < args.iou <= 1.0:
        raise InvalidParameterError(f"--iou must be in (0, 1], got {args.iou}")
    if not 0.0 < args.bg_iou <= 1.0:
        raise InvalidParameterError(f"--bg-iou must be in (0, 1], got {args.bg_iou}")
    if args.eval_start < 0:
        raise InvalidParameterError(f"--eval-start must be >= 0, got {args.eval_start}")
    config = MatchConfig(iou_threshold=args.iou, background_iou_threshold=args.bg_iou)
    manifest = storage.read_manifest(args.gt)
    per_sequence = []
    for pred in storage.read_predictions(args.pred, manifest, dataset_root=args.gt):
        seq = storage.read_sequence(args.gt, pred.index)
        window = (args.eval_start, seq.labels.shape[0])
        stats = metrics.evaluate_sequence(
            seq.labels,
            pred.labels,
            config=config,
            eval_window=window,
            background_labels=seq.background_labels,
            object_count=seq.meta["n_objects"],
        )
        if pred.reconstructions is not None:
            sel = slice(args.eval_start, None)
            metrics.accumulate_mse(
                stats,
                pred.reconstructions[sel] / 255.0,
                seq.frames[sel] / 255.0,
            )
        per_sequence.append(stats)
    merged = per_sequence[0] if per_sequence else metrics.SequenceStats()
    for stats in per_sequence[1:]:
        merged = metrics.merge(merged, stats)
    breakdowns = (
        metrics.breakdown_by_object_count(per_sequence)
        if args.breakdown == "object-count" and per_sequence
        else None
    )
    report = metrics.compute_report(merged, breakdowns)
    document = storage.write_report(report, args.format)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(document)
    print(storage.write_report(report, "markdown"), end="")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"generate": cmd_generate, "track": cmd_track, "evaluate": cmd_evaluate}
    try:
        return handlers[args.command](args)
    except InvalidParameterError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GenerationExhaustedError, NumericalError) as err:
        print(f"generation error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
