#!/usr/bin/env python3
"""Mean objective of each strategy against mean SNR (snr.csv)."""

import argparse

import numpy as np

from targetrate import experiments as ex
from targetrate.fading import FadingConfig

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--realizations", type=int, default=500)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--out", default="results")
args = ap.parse_args()

grid = np.arange(0.0, 21.0, 2.0)
res = ex.snr_sensitivity(grid, FadingConfig(8, 0.0, args.seed, args.realizations))
ex.write_snr_csv(res, args.out)
print("snr_db " + " ".join(f"{s:>22}" for s in ex.STRATEGIES))
for k, snr in enumerate(grid):
    print(f"{snr:6.1f} " + " ".join(f"{res.mean_objective[s][k]:22.4f}" for s in ex.STRATEGIES))
