#!/usr/bin/env python3
"""Sample S(lambda) for the default instance on a log grid (dual_curve.csv)."""

import sys

from targetrate import experiments as ex

out = sys.argv[1] if len(sys.argv) > 1 else "results"
ch = ex.default_channels()
points = ex.dual_curve(ch, ex.dual_curve_grid(ch, 200))
ex.write_dual_curve_csv(points, out)
print(f"wrote {len(points)} points; S(lambda) at the smallest multiplier = "
      f"{points[0].total_power:.4f}, sum of caps = {ch.caps_sum}")
