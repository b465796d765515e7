"""Generate a small test set, run both baseline trackers, print score tables.

Run:  python3 demos/evaluate_baselines.py [workdir]

Shows the full on-disk pipeline: dataset generation, prediction writing,
and mask-based tracking evaluation, for the perfect oracle tracker and the
color-threshold tracker.
"""

import sys
import tempfile
from pathlib import Path

from objmot.cli import main as objmot


def main() -> None:
    work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    data = work / "vmds-test"
    print("== generate: 25 standard sequences (black background) ==")
    objmot(["generate", "--family", "vmds", "--num", "25", "--length", "10",
            "--seed", "1", "--black-background", "--out", str(data)])
    for baseline, extra in (("oracle", []), ("color", ["--background", "black"])):
        preds = work / f"preds-{baseline}"
        print(f"\n== track + evaluate: {baseline} baseline ==")
        objmot(["track", "--baseline", baseline, "--data", str(data),
                "--out", str(preds)] + extra)
        objmot(["evaluate", "--gt", str(data), "--pred", str(preds),
                "--breakdown", "object-count"])
    print(f"\nartifacts kept under {work}")


if __name__ == "__main__":
    main()
