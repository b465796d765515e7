"""Render one sequence per dataset variant into a montage image.

Run:  python3 demos/generate_preview.py [out.png]

Each row of the montage is one variant; the columns are the frames of a
single generated sequence with its instance masks overlaid as outlines.
"""

import sys
from dataclasses import replace

import numpy as np
from PIL import Image

from objmot.datasets import ALL_VARIANTS, default_config, generate_sequence

FAMILY_VARIANTS = [("vmds", v) for v in ALL_VARIANTS if v != "standard"]
FAMILY_VARIANTS = [("vmds", "standard"), ("spmot", "standard")] + FAMILY_VARIANTS


def outline(labels: np.ndarray) -> np.ndarray:
    """Boolean map of pixels whose label differs from a neighbour."""
    edge = np.zeros(labels.shape, dtype=bool)
    edge[:-1] |= labels[:-1] != labels[1:]
    edge[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    return edge


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "preview.png"
    length = 10
    rows = []
    for family, variant in FAMILY_VARIANTS:
        cfg = replace(default_config(family, variant, "test", seed=4),
                      num_sequences=1, length=length)
        sample = generate_sequence(cfg, 0)
        frames = sample.frames.copy()
        for t in range(length):
            frames[t][outline(sample.labels[t])] = (255, 255, 255)
        rows.append((f"{family}/{variant}", np.concatenate(frames, axis=1)))
        print(f"{family}/{variant}: {sample.n_objects} objects, "
              f"{length} frames")

    montage = np.concatenate([row for _, row in rows], axis=0)
    Image.fromarray(montage).resize(
        (montage.shape[1] * 2, montage.shape[0] * 2), Image.NEAREST
    ).save(out)
    print(f"wrote {out} ({len(rows)} rows, one per variant)")


if __name__ == "__main__":
    main()
