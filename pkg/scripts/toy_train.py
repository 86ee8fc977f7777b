#!/usr/bin/env python3
"""Train the gesture generator on the synthetic toy corpus and plot the
loss curve as plain text.

    python3 scripts/toy_train.py --steps 500 --seed 0 --out-dir runs/toy
"""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gesturelab import camn
from gesturelab.cli import main as cli_main


def sparkline(values, width: int = 60) -> str:
    blocks = " .:-=+*#%@"
    v = np.asarray(values)
    idx = np.linspace(0, len(v) - 1, width).astype(int)
    sampled = v[idx]
    lo, hi = sampled.min(), sampled.max()
    span = (hi - lo) or 1.0
    return "".join(blocks[int((x - lo) / span * (len(blocks) - 1))] for x in sampled)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="runs/toy")
    args = ap.parse_args()

    code = cli_main([
        "camn", "train", "--toy",
        "--steps", str(args.steps),
        "--seed", str(args.seed),
        "--out-dir", args.out_dir,
    ])
    if code != 0:
        return code

    losses = np.loadtxt(
        os.path.join(args.out_dir, "loss_curve.csv"),
        delimiter=",", skiprows=1, usecols=1,
    )
    print("generator loss:", sparkline(losses))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
