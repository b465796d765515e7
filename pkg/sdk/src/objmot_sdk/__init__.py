"""Loader / writer companion package for objmot benchmark artifacts.

Training pipelines use this package to read generated datasets and to
emit predictions the evaluator can score, without depending on the
benchmark library itself: the only contract is the on-disk layout
(``manifest.json``, ``seq_NNNNNN/frame_TTT.png`` / ``mask_TTT.png`` /
``meta.json`` for datasets; ``seq_NNNNNN/pred_TTT.png`` plus optional
``recon_TTT.png`` and ``pred_meta.json`` for predictions).

No metric computation lives here; the evaluator is the single source of
metric truth. The only numerical helper is :func:`labels_from_slots`,
which converts a per-slot soft-mask stack into a hard label map by
argmax, since the evaluator only accepts hard (single-channel) masks.
"""

from .sdk import (
    DatasetLayoutError,
    PredictionFormatError,
    SequenceData,
    labels_from_slots,
    load_dataset,
    write_predictions,
)

__all__ = [
    "DatasetLayoutError",
    "PredictionFormatError",
    "SequenceData",
    "labels_from_slots",
    "load_dataset",
    "write_predictions",
]

__version__ = "0.1.0"
