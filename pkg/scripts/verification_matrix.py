"""Run every check on the built-in families and print a pass/fail matrix.

    python scripts/verification_matrix.py [--grid 16] [--json out.json]
"""

import argparse
import json

from sasakian_euler import families as Fam
from sasakian_euler.grids import SampleGrid
from sasakian_euler.verify import run_checks


def cases():
    yield "kkps(x, 1-x)", Fam.kkps("x", "1-x")
    yield "kkps(1, 0)", Fam.kkps("1", "0")
    yield "hyperbolic(x^2, sin(x))", Fam.hyperbolic("x^2", "sin(x)")
    for a in (0.0, 0.5, 1.0, 2.0):
        yield f"nomizu(a={a:g}, 2(3x-2))", Fam.nomizu_family(a, "2*(3*x-2)")
    for a1, a2 in ((1, 1), (1, -1), (1, 2), (0, 1)):
        yield f"two-killing({a1}, {a2})", Fam.two_killing(a1, a2)
    yield "mirror two-killing(1, 2)", Fam.mirror(Fam.two_killing(1, 2))
    for tag in Fam.TWIN_TAGS:
        yield f"twin {tag}", Fam.twin_family(tag)
    for chart in ("nil", "sl2"):
        yield f"ansatz {chart}", Fam.ansatz_example(chart, "x", "x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=16)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--json")
    args = ap.parse_args()

    names = {"divergence": "div", "steady_euler": "euler", "localizable": "loc", "bernoulli_conserved": "bern",
             "commutator": "comm", "xi_symmetry": "xi", "frame_vs_chart": "cross"}
    cols = list(names.values()) + ["beltrami"]
    print(f"{'family':34s}" + "".join(f"{c:>10s}" for c in cols))
    table = {}
    for label, desc in cases():
        grid = SampleGrid(desc.chart, counts=(args.grid,) * 3)
        row = {}
        for rep in run_checks(desc, ("all",), grid, threads=args.threads):
            key = "beltrami" if rep.check.startswith("beltrami") else names[rep.check]
            row[key] = rep
        table[label] = {k: r.to_dict() for k, r in row.items()}
        cells = [("PASS" if row[c].passed else "FAIL") if c in row else "-" for c in cols]
        print(f"{label:34s}" + "".join(f"{c:>10s}" for c in cells))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(table, fh, indent=2)


if __name__ == "__main__":
    main()
