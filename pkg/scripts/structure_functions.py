"""Structure functions and frame-axiom residuals of the adapted frames."""

import argparse

import numpy as np

from sasakian_euler import jets as J
from sasakian_euler.frames import frame_axiom_residuals, frame_for_chart
from sasakian_euler.grids import SampleGrid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=12)
    args = ap.parse_args()
    for chart in ("s3", "nil", "sl2"):
        frame = frame_for_chart(chart)
        pts = SampleGrid(chart, counts=(args.grid,) * 3).points()
        C = [np.broadcast_to(np.asarray(c, dtype=float), pts.shape[1:])
             for c in J.evaluate(lambda X: frame.at(X).C, pts)]
        gram, res = J.evaluate(lambda X: frame_axiom_residuals(frame.at(X)), pts)
        worst = max(float(np.max(np.abs(v))) for v in (*gram, *res))
        xi = J.evaluate(lambda X: (lambda fp: fp.curl((1.0, 0.0, 0.0)))(frame.at(X)), pts)
        curl_ratio = np.broadcast_to(np.asarray(xi[0], dtype=float), pts.shape[1:])
        print(f"{frame.name:16s} " + "  ".join(f"{n}=[{c.min():+.12f}, {c.max():+.12f}]"
                                              for n, c in zip(("C0", "C1", "C2"), C))
              + f"  curl xi/xi={curl_ratio.mean():.12f}  axioms={worst:.2e}")


if __name__ == "__main__":
    main()
