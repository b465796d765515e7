"""Draw a handful of smooth and linear trajectories and report their statistics.

Run:  python3 demos/sample_trajectories.py [out.png]

Samples ten smooth Gaussian-process paths and five constant-velocity paths,
prints the empirical lag-1 temporal correlation of the smooth paths against
its closed-form value, and renders all paths into a PNG plot.
"""

import sys

import numpy as np
from PIL import Image, ImageDraw

from objmot.seeding import rng_for
from objmot.trajectory import (
    GpParams,
    sample_linear_trajectory,
    sample_trajectory,
    vmds_gp_params,
)


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "trajectories.png"
    rng = rng_for(0, "demo-trajectories")

    smooth_params = vmds_gp_params(length=40)
    smooth = [sample_trajectory(rng, smooth_params) for _ in range(10)]
    linear = [
        sample_linear_trajectory(rng, length=40, bounds=(10.0, 54.0),
                                 speed_range=(-1.0, 1.0))
        for _ in range(5)
    ]

    deshifted = np.stack([t.points - np.asarray(t.shift) for t in smooth])
    lag1 = np.mean(deshifted[:, :-1] * deshifted[:, 1:]) / np.mean(deshifted ** 2)
    print(f"smooth paths: {len(smooth)}, length {smooth_params.length}, "
          f"bounds [{smooth_params.bounds_lo}, {smooth_params.bounds_hi}]")
    print(f"empirical lag-1 correlation {lag1:.3f} "
          f"(closed form {np.exp(-1 / (2 * smooth_params.tau ** 2)):.3f})")

    scale = 8
    img = Image.new("RGB", (64 * scale, 64 * scale), (255, 255, 255))
    draw = ImageDraw.Draw(img)
    for i, traj in enumerate(smooth):
        pts = [(x * scale, y * scale) for x, y in traj.points]
        draw.line(pts, fill=(40, 90 + 15 * i, 200), width=2)
    for traj in linear:
        pts = [(x * scale, y * scale) for x, y in traj.points]
        draw.line(pts, fill=(200, 80, 40), width=2)
    img.save(out)
    print(f"wrote {out} (blue: smooth, orange: linear)")


if __name__ == "__main__":
    main()
