"""Read benchmark datasets and write evaluable predictions."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np
from PIL import Image

MANIFEST_NAME = "manifest.json"
PRED_META_NAME = "pred_meta.json"


class DatasetLayoutError(Exception):
    """A dataset directory violates the expected on-disk layout."""


class PredictionFormatError(ValueError):
    """Prediction arrays are not in an evaluable (hard label map) form."""


def _seq_dir_name(index: int) -> str:
    return f"seq_{index:06d}"


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise DatasetLayoutError(f"missing metadata file: {path}") from None
    except json.JSONDecodeError as err:
        raise DatasetLayoutError(f"corrupt JSON in {path}: {err}") from None


@dataclass
class SequenceData:
    """One loaded sequence: float frames, integer labels, parsed metadata."""

    index: int
    frames: np.ndarray  # (T, H, W, 3) float64 in [0, 1]
    labels: np.ndarray  # (T, H, W) int64; 0 = background
    meta: dict

    @property
    def n_objects(self) -> int:
        return int(self.meta["n_objects"])


def _load_sequence(root: Path, index: int) -> SequenceData:
    seq = root / _seq_dir_name(index)
    meta = _load_json(seq / "meta.json")
    frames = []
    labels = []
    for t in range(meta["length"]):
        frame_path = seq / f"frame_{t:03d}.png"
        mask_path = seq / f"mask_{t:03d}.png"
        for path in (frame_path, mask_path):
            if not path.exists():
                raise DatasetLayoutError(f"missing file: {path}")
        frames.append(np.asarray(Image.open(frame_path).convert("RGB"), dtype=np.float64) / 255.0)
        labels.append(np.asarray(Image.open(mask_path), dtype=np.int64))
    return SequenceData(index=index, frames=np.stack(frames), labels=np.stack(labels), meta=meta)


def load_dataset(path) -> Iterator[SequenceData]:
    """Lazily yield the sequences of a dataset directory in index order.

    Frames come back as float arrays in [0, 1], label maps as integer
    arrays with 0 meaning background. Layout problems raise
    :class:`DatasetLayoutError` naming the offending file.
    """
    root = Path(path)
    manifest = _load_json(root / MANIFEST_NAME)
    for entry in manifest["sequences"]:
        yield _load_sequence(root, entry["index"])


def labels_from_slots(slots: np.ndarray, background_threshold: float | None = None) -> np.ndarray:
    """Convert a per-slot soft-mask stack into a hard label map.

    `slots` has shape (K, H, W) for one frame or (T, K, H, W) for a
    sequence. Each pixel is assigned to the slot with the highest value
    (label = slot index + 1), giving every pixel a unique hypothesis as
    the evaluator requires. With `background_threshold`, pixels whose
    best slot value falls below the threshold become background (0).
    """
    arr = np.asarray(slots, dtype=float)
    if arr.ndim == 3:
        return labels_from_slots(arr[None], background_threshold)[0]
    if arr.ndim != 4:
        raise PredictionFormatError(
            f"slot stack must have shape (K, H, W) or (T, K, H, W), got {arr.shape}"
        )
    if arr.shape[1] == 0:
        raise PredictionFormatError("slot stack has zero slots")
    labels = np.argmax(arr, axis=1).astype(np.uint8) + 1
    if background_threshold is not None:
        labels[np.max(arr, axis=1) < background_threshold] = 0
    return labels


def _check_label_maps(label_maps) -> list[np.ndarray]:
    checked = []
    for i, arr in enumerate(label_maps):
        arr = np.asarray(arr)
        if np.issubdtype(arr.dtype, np.floating) or arr.ndim == 4:
            raise PredictionFormatError(
                f"sequence {i}: got soft masks {arr.dtype} {arr.shape}; convert "
                "per-slot probabilities with labels_from_slots() first"
            )
        if not np.issubdtype(arr.dtype, np.integer) or arr.ndim != 3:
            raise PredictionFormatError(
                f"sequence {i}: label maps must be integer arrays of shape "
                f"(T, H, W), got {arr.dtype} {arr.shape}"
            )
        if arr.min() < 0 or arr.max() > 255:
            raise PredictionFormatError(
                f"sequence {i}: label values must fit in [0, 255]"
            )
        checked.append(arr.astype(np.uint8))
    return checked


def write_predictions(
    path,
    label_maps: Sequence[np.ndarray] | Mapping[int, np.ndarray],
    reconstructions: Sequence[np.ndarray] | Mapping[int, np.ndarray] | None = None,
    producer: str = "objmot-sdk",
) -> None:
    """Write per-sequence predicted label maps in the evaluator's layout.

    `label_maps` is either a sequence of (T, H, W) integer arrays, one
    per dataset sequence in index order, or a mapping from sequence
    index to such an array. Optional `reconstructions` (uint8 RGB,
    (T, H, W, 3), same indexing) are stored alongside. All inputs are
    validated before any file is written: soft masks and mismatched
    frame counts fail fast with nothing on disk.
    """
    if isinstance(label_maps, Mapping):
        items = sorted(label_maps.items())
    else:
        items = list(enumerate(label_maps))
    indices = [index for index, _ in items]
    arrays = _check_label_maps([arr for _, arr in items])

    recon_by_index: dict[int, np.ndarray] = {}
    if reconstructions is not None:
        if isinstance(reconstructions, Mapping):
            recon_items = sorted(reconstructions.items())
        else:
            recon_items = list(enumerate(reconstructions))
        if [index for index, _ in recon_items] != indices:
            raise PredictionFormatError(
                "reconstructions must cover exactly the same sequence indices "
                "as the label maps"
            )
        for (index, recon), labels in zip(recon_items, arrays):
            recon = np.asarray(recon)
            if recon.shape != labels.shape + (3,):
                raise PredictionFormatError(
                    f"sequence {index}: reconstruction shape {recon.shape} does "
                    f"not match {labels.shape + (3,)}"
                )
            recon_by_index[index] = recon.astype(np.uint8)

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for index, labels in zip(indices, arrays):
        seq = root / _seq_dir_name(index)
        seq.mkdir(parents=True, exist_ok=True)
        for t in range(labels.shape[0]):
            Image.fromarray(labels[t], mode="L").save(seq / f"pred_{t:03d}.png")
            if index in recon_by_index:
                Image.fromarray(recon_by_index[index][t], mode="RGB").save(
                    seq / f"recon_{t:03d}.png"
                )
    payload = {"producer": producer, "background_ids": []}
    (root / PRED_META_NAME).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
