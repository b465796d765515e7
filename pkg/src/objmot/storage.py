"""On-disk formats for datasets, predictions and reports.

Dataset layout (one directory per dataset)::

    manifest.json
    seq_000000/
        frame_000.png   8-bit RGB
        mask_000.png    8-bit single channel; 0 = background
        ...
        meta.json       scene, seed, config hash, crossing, visibility

Prediction layout mirrors it::

    seq_000000/
        pred_000.png    8-bit single channel hypothesis label map
        recon_000.png   optional RGB reconstruction
        ...
    pred_meta.json      producer name, optional background ids

All metadata is JSON with sorted keys, so identical content produces
identical bytes and digests.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .datasets import GENERATOR_VERSION, DatasetConfig, config_hash
from .errors import ValidationError
from .raster import VideoSample
from .scene import SceneSpec, ScheduledObject, SpriteSpec
from .trajectory import CrossingRecord, Trajectory

MANIFEST_NAME = "manifest.json"
PRED_META_NAME = "pred_meta.json"


def seq_dir_name(index: int) -> str:
    return f"seq_{index:06d}"


# ---------------------------------------------------------------------------
# Scene (de)serialization


def scene_to_dict(scene: SceneSpec) -> dict:
    return {
        "background_color": list(scene.background_color),
        "canvas": list(scene.canvas),
        "length": scene.length,
        "crossing": None
        if scene.crossing is None
        else {
            "frame": scene.crossing.frame,
            "position": list(scene.crossing.position),
            "pair": list(scene.crossing.pair),
        },
        "objects": [
            {
                "shape": o.sprite.shape,
                "scale_index": o.sprite.scale_index,
                "orientation": o.sprite.orientation,
                "color": list(o.sprite.color),
                "rotation_rate": o.rotation_rate,
                "hue_rate": o.hue_rate,
                "size_schedule": list(o.size_schedule),
                "depth_rank": o.depth_rank,
                "trajectory": np.asarray(o.trajectory.points).tolist(),
                "shift": None if o.trajectory.shift is None else list(o.trajectory.shift),
            }
            for o in scene.objects
        ],
    }


def scene_from_dict(data: dict) -> SceneSpec:
    objects = tuple(
        ScheduledObject(
            sprite=SpriteSpec(
                shape=o["shape"],
                scale_index=o["scale_index"],
                orientation=o["orientation"],
                color=tuple(o["color"]),
            ),
            trajectory=Trajectory(
                np.asarray(o["trajectory"], dtype=float),
                shift=None if o["shift"] is None else tuple(o["shift"]),
            ),
            size_schedule=tuple(o["size_schedule"]),
            depth_rank=o["depth_rank"],
            rotation_rate=o["rotation_rate"],
            hue_rate=o["hue_rate"],
        )
        for o in data["objects"]
    )
    crossing = None
    if data.get("crossing") is not None:
        c = data["crossing"]
        crossing = CrossingRecord(
            frame=c["frame"], position=tuple(c["position"]), pair=tuple(c["pair"])
        )
    return SceneSpec(
        objects=objects,
        background_color=tuple(data["background_color"]),
        canvas=tuple(data["canvas"]),
        length=data["length"],
        crossing=crossing,
    )


# ---------------------------------------------------------------------------
# Dataset writing / reading


def _dump_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ValidationError(f"missing metadata file: {path}") from None
    except json.JSONDecodeError as err:
        raise ValidationError(f"corrupt JSON in {path}: {err}") from None


def sample_digest(sample: VideoSample) -> str:
    h = hashlib.sha256()
    h.update(sample.frames.tobytes())
    h.update(sample.labels.tobytes())
    h.update(sample.visibility.tobytes())
    h.update(json.dumps(scene_to_dict(sample.scene), sort_keys=True).encode())
    return h.hexdigest()


def write_sequence(sample: VideoSample, root: Path, index: int) -> str:
    """Write one sequence directory; returns its content digest."""
    seq = Path(root) / seq_dir_name(index)
    seq.mkdir(parents=True, exist_ok=True)
    for t in range(sample.length):
        Image.fromarray(sample.frames[t], mode="RGB").save(seq / f"frame_{t:03d}.png")
        Image.fromarray(sample.labels[t], mode="L").save(seq / f"mask_{t:03d}.png")
    meta = {
        "scene": scene_to_dict(sample.scene),
        "seed_info": sample.seed_info,
        "length": int(sample.length),
        "resolution": [int(sample.frames.shape[1]), int(sample.frames.shape[2])],
        "n_objects": int(sample.n_objects),
        "visibility": sample.visibility.astype(int).tolist(),
        "background_labels": [],
    }
    _dump_json(seq / "meta.json", meta)
    return sample_digest(sample)


def write_dataset(samples, root, config: DatasetConfig | None = None) -> dict:
    """Write a stream of samples and the manifest; returns the manifest."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    digests = []
    for i, sample in enumerate(samples):
        digests.append({"index": i, "digest": write_sequence(sample, root, i)})
    manifest = {
        "version": GENERATOR_VERSION,
        "sequence_count": len(digests),
        "config": None if config is None else asdict(config),
        "config_hash": None if config is None else config_hash(config),
        "sequences": digests,
    }
    _dump_json(root / MANIFEST_NAME, manifest)
    return manifest


def write_manifest_from_digests(root, digests: list[str], config: DatasetConfig | None) -> dict:
    """Build the manifest when sequences were written out-of-band (e.g. workers)."""
    manifest = {
        "version": GENERATOR_VERSION,
        "sequence_count": len(digests),
        "config": None if config is None else asdict(config),
        "config_hash": None if config is None else config_hash(config),
        "sequences": [{"index": i, "digest": d} for i, d in enumerate(digests)],
    }
    _dump_json(Path(root) / MANIFEST_NAME, manifest)
    return manifest


def read_manifest(root) -> dict:
    return _load_json(Path(root) / MANIFEST_NAME)


@dataclass
class StoredSequence:
    """One dataset sequence loaded back from disk."""

    index: int
    frames: np.ndarray  # (T, H, W, 3) uint8
    labels: np.ndarray  # (T, H, W) uint8
    meta: dict

    @property
    def scene(self) -> SceneSpec:
        return scene_from_dict(self.meta["scene"])

    @property
    def background_labels(self) -> set[int]:
        return set(self.meta.get("background_labels", []))


def read_sequence(root, index: int) -> StoredSequence:
    seq = Path(root) / seq_dir_name(index)
    meta = _load_json(seq / "meta.json")
    frames = []
    labels = []
    for t in range(meta["length"]):
        fpath = seq / f"frame_{t:03d}.png"
        mpath = seq / f"mask_{t:03d}.png"
        for p in (fpath, mpath):
            if not p.exists():
                raise ValidationError(f"missing file: {p}")
        frames.append(np.asarray(Image.open(fpath).convert("RGB")))
        labels.append(np.asarray(Image.open(mpath)))
    return StoredSequence(
        index=index, frames=np.stack(frames), labels=np.stack(labels), meta=meta
    )


def read_dataset(root):
    """Iterate stored sequences in index order."""
    manifest = read_manifest(root)
    for entry in manifest["sequences"]:
        yield read_sequence(root, entry["index"])


# ---------------------------------------------------------------------------
# Predictions


@dataclass
class PredictionSet:
    """Per-frame predicted label maps for one sequence."""

    index: int
    labels: np.ndarray  # (T, H, W) integer hypothesis label maps
    reconstructions: np.ndarray | None = None  # (T, H, W, 3) uint8


def write_prediction_sequence(root, index: int, labels: np.ndarray, reconstructions=None):
    seq = Path(root) / seq_dir_name(index)
    seq.mkdir(parents=True, exist_ok=True)
    labels = np.asarray(labels)
    for t in range(labels.shape[0]):
        Image.fromarray(labels[t].astype(np.uint8), mode="L").save(seq / f"pred_{t:03d}.png")
        if reconstructions is not None:
            Image.fromarray(np.asarray(reconstructions[t], dtype=np.uint8), mode="RGB").save(
                seq / f"recon_{t:03d}.png"
            )


def write_prediction_meta(root, producer: str, background_ids: list[int] | None = None, extra: dict | None = None):
    payload = {"producer": producer, "background_ids": background_ids or []}
    if extra:
        payload.update(extra)
    _dump_json(Path(root) / PRED_META_NAME, payload)


def read_prediction_meta(root) -> dict:
    path = Path(root) / PRED_META_NAME
    if not path.exists():
        return {"producer": "unknown", "background_ids": []}
    return _load_json(path)


def read_predictions(pred_root, dataset_manifest: dict, dataset_root=None):
    """Validate and stream prediction sets against a dataset manifest.

    Checks that every sequence has the expected number of prediction
    frames with the dataset's resolution and single-channel (hard) label
    maps. Raises ValidationError naming the offending file.
    """
    pred_root = Path(pred_root)
    if not pred_root.is_dir():
        raise ValidationError(f"prediction directory does not exist: {pred_root}")
    for entry in dataset_manifest["sequences"]:
        index = entry["index"]
        seq = pred_root / seq_dir_name(index)
        if dataset_root is not None:
            meta = _load_json(Path(dataset_root) / seq_dir_name(index) / "meta.json")
            length = meta["length"]
            resolution = tuple(meta["resolution"])
        else:
            length, resolution = None, None
        if not seq.is_dir():
            raise ValidationError(f"missing prediction directory: {seq}")
        pred_files = sorted(seq.glob("pred_*.png"))
        if length is not None and len(pred_files) != length:
            missing = {f"pred_{t:03d}.png" for t in range(length)} - {p.name for p in pred_files}
            detail = f"missing {sorted(missing)[0]}" if missing else f"found {len(pred_files)}"
            raise ValidationError(
                f"{seq_dir_name(index)}: expected {length} prediction frames, {detail}"
            )
        labels = []
        for p in pred_files:
            img = Image.open(p)
            if img.mode != "L":
                raise ValidationError(f"{p}: prediction label maps must be single-channel (hard)")
            arr = np.asarray(img)
            if resolution is not None and arr.shape != resolution:
                raise ValidationError(
                    f"{p}: resolution {arr.shape} does not match dataset {resolution}"
                )
            labels.append(arr)
        recon_files = sorted(seq.glob("recon_*.png"))
        recons = None
        if recon_files:
            if length is not None and len(recon_files) != length:
                raise ValidationError(
                    f"{seq_dir_name(index)}: {len(recon_files)} reconstructions for {length} frames"
                )
            recons = np.stack([np.asarray(Image.open(p).convert("RGB")) for p in recon_files])
        yield PredictionSet(index=index, labels=np.stack(labels), reconstructions=recons)


# ---------------------------------------------------------------------------
# Reports

_REPORT_FIELDS = (
    "mota", "motp", "md", "mt", "match_frac", "miss_frac", "idsw_frac", "fp_frac", "mse",
)
_MARKDOWN_COLUMNS = (
    ("MOTA", "mota"), ("MOTP", "motp"), ("MD", "md"), ("MT", "mt"),
    ("Match", "match_frac"), ("Miss", "miss_frac"), ("ID S.", "idsw_frac"),
    ("FPs", "fp_frac"), ("MSE", "mse"),
)


def report_to_dict(report) -> dict:
    data = {name: getattr(report, name) for name in _REPORT_FIELDS}
    data["breakdowns"] = {str(k): v for k, v in report.breakdowns.items()}
    return data


def report_from_dict(data: dict):
    from .metrics import MetricsReport

    return MetricsReport(
        **{name: data.get(name) for name in _REPORT_FIELDS},
        breakdowns={int(k): v for k, v in data.get("breakdowns", {}).items()},
    )


def _fmt_pct(value: float | None) -> str:
    if value is None:
        return "—"
    return f"{100.0 * value:.1f}"


def write_report(report, fmt: str = "json") -> str:
    """Render a report as json (full precision), csv, or markdown."""
    if fmt == "json":
        return json.dumps(report_to_dict(report), sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        lines = ["group," + ",".join(name for name, _ in _MARKDOWN_COLUMNS)]
        row = [str(getattr(report, attr)) for _, attr in _MARKDOWN_COLUMNS]
        lines.append("overall," + ",".join(row))
        for count in sorted(report.breakdowns):
            fracs = report.breakdowns[count]
            lines.append(
                f"{count} objects,,,,,"
                f"{fracs['match']},{fracs['miss']},{fracs['id_switch']},{fracs['false_positive']},"
            )
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        header = "| " + " | ".join(name for name, _ in _MARKDOWN_COLUMNS) + " |"
        sep = "|" + "---|" * len(_MARKDOWN_COLUMNS)
        mse_cell = "—" if report.mse is None else f"{report.mse:.4f}"
        cells = [_fmt_pct(getattr(report, attr)) for _, attr in _MARKDOWN_COLUMNS[:-1]] + [mse_cell]
        lines = [header, sep, "| " + " | ".join(cells) + " |"]
        for count in sorted(report.breakdowns):
            fracs = report.breakdowns[count]
            lines.append(
                f"| {count} objects: match {_fmt_pct(fracs['match'])}, "
                f"miss {_fmt_pct(fracs['miss'])}, "
                f"ID S. {_fmt_pct(fracs['id_switch'])}, "
                f"FPs {_fmt_pct(fracs['false_positive'])} " + "|" * 1
            )
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown report format {fmt!r}")
