"""Procedural multi-object tracking benchmark toolkit.

Generates synthetic videos with pixel-exact instance masks (smooth
Gaussian-process sprite motion and linear sprite motion) and evaluates
arbitrary segmentation-mask predictions under a mask-based CLEAR MOT
protocol.
"""

__version__ = "0.1.0"

from .datasets import DatasetConfig, default_config, generate_dataset, generate_sequence
from .matcher import CorrespondenceState, MatchConfig, hungarian, iou, match_frame
from .metrics import (
    MetricsReport,
    SequenceStats,
    compute_report,
    evaluate_sequence,
    mota,
    motp,
)
from .raster import VideoSample, compose_frame, rasterize_sprite, render_video
from .scene import SceneSpec, build_spmot_scene, build_vmds_scene
from .trajectory import (
    GpParams,
    Trajectory,
    sample_linear_trajectory,
    sample_trajectory,
    se_kernel,
)

__all__ = [
    "DatasetConfig",
    "default_config",
    "generate_dataset",
    "generate_sequence",
    "CorrespondenceState",
    "MatchConfig",
    "hungarian",
    "iou",
    "match_frame",
    "MetricsReport",
    "SequenceStats",
    "compute_report",
    "evaluate_sequence",
    "mota",
    "motp",
    "VideoSample",
    "compose_frame",
    "rasterize_sprite",
    "render_video",
    "SceneSpec",
    "build_spmot_scene",
    "build_vmds_scene",
    "GpParams",
    "Trajectory",
    "sample_linear_trajectory",
    "sample_trajectory",
    "se_kernel",
]
