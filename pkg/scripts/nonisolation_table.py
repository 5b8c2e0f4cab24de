"""C^k distance of the bifurcating pairs against the deformation parameter.

A constant last column means the distance is linear in a, so the deformed
fields approach u_0 in C^k.
"""

import argparse

from sasakian_euler.cli import PAIRS, bifurcation_pair
from sasakian_euler.grids import SampleGrid
from sasakian_euler.verify import check_localizable, ck_distance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=16)
    ap.add_argument("--k", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--a", type=float, nargs="+", default=[1e-3, 1e-2, 1e-1])
    args = ap.parse_args()
    grid = SampleGrid(counts=(args.grid,) * 3)
    for pair in PAIRS:
        print(f"\n{pair}")
        print(f"{'a':>8s} {'k':>3s} {'distance':>14s} {'distance/a':>14s} {'sup|u(|u|^2)|':>15s}")
        for a in args.a:
            u, u0 = bifurcation_pair(pair, a)
            loc = check_localizable(u, grid).max_residual
            for k in args.k:
                d = ck_distance(u, u0, k, grid)
                print(f"{a:8.0e} {k:3d} {d:14.8g} {d / a:14.8g} {loc:15.6e}")
        print(f"u_0 localizability residual: {check_localizable(bifurcation_pair(pair, 0.0)[1], grid).max_residual:.3e}")


if __name__ == "__main__":
    main()
