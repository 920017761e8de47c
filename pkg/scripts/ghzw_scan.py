"""Scan the GHZ/W mixture axis: flat-decomposition value, convex envelope and breakpoints.

    python3 scripts/ghzw_scan.py --points 201 > ghzw.csv
"""
import argparse
import sys
from dataclasses import dataclass

import numpy as np

from polyroof.ghzw import X_O, AxisEnvelope, convexity_breakpoint, ghzw_build, ghzw_flat_f, x_of_p


@dataclass
class ScanConfig:
    points: int = 201
    grid: int = 2000


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=ScanConfig.points)
    ap.add_argument("--grid", type=int, default=ScanConfig.grid)
    cfg = ScanConfig(**vars(ap.parse_args()))

    N = ghzw_build(0.5)[2].normalization_N
    env = AxisEnvelope(N, grid=cfg.grid)
    print(f"# x_O = {X_O:.12f}", file=sys.stderr)
    print(f"# second-difference breakpoint x = {convexity_breakpoint():.6f}", file=sys.stderr)
    if env.tangent_x is not None:
        print(f"# envelope tangent point x = {env.tangent_x:.6f}", file=sys.stderr)

    print("p,x,flat,envelope")
    for p in np.linspace(0, 1, cfg.points):
        x = float(x_of_p(p))
        flat = N * float(ghzw_flat_f(x)) if x > 0 else 0.0
        print(f"{p:.6f},{x:.6f},{flat:.12g},{float(env(x)):.12g}")


if __name__ == "__main__":
    main()
