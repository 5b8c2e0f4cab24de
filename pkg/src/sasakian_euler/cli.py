"""Command-line front end: ``sasakian-euler <command> [flags]``.

Exit codes: 0 when every requested check passes, 1 when any fails, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import jets as J
from .families import FamilyDescriptor, build, nomizu_family, two_killing
from .frames import FrameField, frame_axiom_residuals, frame_for_chart
from .grids import SampleGrid
from .isometries import isometry_from_tag, pushforward_vector
from .verify import CHECKS, ck_distance, reports_to_json, run_checks

COMMANDS = ("verify", "ck-distance", "flowline", "frames", "export")
PAIRS = ("two-killing-bifurcation", "nomizu-beltrami")
PARAM_KEYS = ("A", "B", "F", "G", "a", "a1", "a2", "b")


@dataclass
class RunConfig:
    command: str = "verify"
    family: str = "kkps"
    params: dict = field(default_factory=dict)
    chart: str | None = None
    grid: list = field(default_factory=lambda: [24, 24, 24])
    margin: float | None = None
    checks: list = field(default_factory=lambda: ["all"])
    tol: float | None = None
    mu: float | None = None
    isometry: str | None = None
    seed: int = 0
    random_points: int = 0
    threads: int = 1
    out: str | None = None
    report: str | None = None
    family_pair: str = "two-killing-bifurcation"
    a_values: list = field(default_factory=lambda: [1e-3, 1e-2, 1e-1])
    k: int = 2
    start: list = field(default_factory=lambda: [0.6, 0.4, 1.3])
    dt: float = 1e-3
    steps: int = 1000
    vortex: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if len(self.grid) != 3 or min(self.grid) < 1:
            raise ValueError("grid needs three positive counts")
        bad = set(self.params) - set(PARAM_KEYS)
        if bad:
            raise ValueError(f"unknown family parameters: {', '.join(sorted(bad))}")
        unknown = set(self.checks) - set(CHECKS) - {"all"}
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
        if self.family_pair not in PAIRS:
            raise ValueError(f"unknown family pair {self.family_pair!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def sample_grid(self, chart: str) -> SampleGrid:
        return SampleGrid(chart=chart, counts=tuple(self.grid), margin=self.margin,
                          random_count=self.random_points, seed=self.seed)


# -- argument parsing ---------------------------------------------------------------


def _grid_spec(text: str) -> list:
    try:
        parts = [int(v) for v in text.lower().split("x")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 24x24x24, got {text!r}")
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like 24x24x24, got {text!r}")
    return parts


def _triple(text: str) -> list:
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}")
    return vals


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--chart")
    p.add_argument("--grid", type=_grid_spec)
    p.add_argument("--margin", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--random-points", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--report")


def _family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family")
    for key in ("A", "B", "F", "G"):
        p.add_argument(f"--profile-{key}", dest=f"p_{key}", metavar="EXPR")
    for key in ("a", "a1", "a2", "b"):
        p.add_argument(f"--{key}", dest=f"p_{key}", type=float)
    p.add_argument("--isometry", help="push the family forward by psi, mirror, sec43 or 16 numbers")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sasakian-euler",
                                     description="Steady Euler fields on Sasakian 3-manifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run residual checks on a family")
    _common(v)
    _family_flags(v)
    v.add_argument("--check", action="append", dest="checks", choices=("all",) + CHECKS)
    v.add_argument("--mu", type=float)

    c = sub.add_parser("ck-distance", help="C^k distance of a bifurcating pair")
    _common(c)
    c.add_argument("--family-pair", choices=PAIRS)
    c.add_argument("--a", dest="a_values", type=float, nargs="+")
    c.add_argument("--k", type=int)

    f = sub.add_parser("flowline", help="integrate a stream or vortex line")
    _common(f)
    _family_flags(f)
    f.add_argument("--start", type=_triple)
    f.add_argument("--dt", type=float)
    f.add_argument("--steps", type=int)
    f.add_argument("--vortex", action="store_true", default=None)

    fr = sub.add_parser("frames", help="derive and validate an adapted frame")
    _common(fr)

    e = sub.add_parser("export", help="write field samples and residuals")
    _common(e)
    _family_flags(e)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
    data["command"] = args.command
    params = dict(data.get("params", {}))
    for key in PARAM_KEYS:
        val = getattr(args, f"p_{key}", None)
        if val is not None:
            params[key] = val
    data["params"] = params
    for name in ("family", "chart", "grid", "margin", "tol", "seed", "random_points", "threads",
                 "out", "report", "checks", "mu", "isometry", "family_pair", "a_values", "k",
                 "start", "dt", "steps", "vortex"):
        val = getattr(args, name, None)
        if val is not None:
            data[name] = val
    return RunConfig.from_dict(data)


# -- commands ----------------------------------------------------------------------


def _family(cfg: RunConfig) -> FamilyDescriptor:
    params = dict(cfg.params)
    if cfg.family == "ansatz" and cfg.chart:
        params["chart"] = cfg.chart
    desc = build(cfg.family, **params)
    if cfg.isometry:
        from dataclasses import replace
        iso = isometry_from_tag(cfg.isometry)
        desc = replace(desc, tag=f"{iso.name}_*{desc.tag}", field=pushforward_vector(iso, desc.field),
                       bernoulli=None, pressure=None, localizability=None,
                       mu=None if desc.mu is None else desc.mu * iso.det)
    return desc


def _chart_of(desc: FamilyDescriptor) -> str:
    return desc.chart


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def cmd_verify(cfg: RunConfig) -> int:
    desc = _family(cfg)
    grid = cfg.sample_grid(_chart_of(desc))
    reports = run_checks(desc, cfg.checks, grid, cfg.tol, cfg.mu, cfg.threads)
    for r in reports:
        print(r.line())
    doc = reports_to_json(reports, meta={"family": desc.describe(), "grid": grid.describe(),
                                         "config": cfg.to_dict()})
    if cfg.report:
        with open(cfg.report, "w") as fh:
            fh.write(doc + "\n")
    return 0 if all(r.passed for r in reports) else 1


def bifurcation_pair(name: str, a: float):
    """(u_a, u_0) for the named one-parameter deformation."""
    if name == "two-killing-bifurcation":
        return two_killing(1.0, a - 1.0), two_killing(1.0, -1.0)
    if name == "nomizu-beltrami":
        return nomizu_family(a, "2*(3*x-2)"), nomizu_family(0.0, "2*(3*x-2)")
    raise ValueError(f"unknown family pair {name!r}")


def cmd_ck_distance(cfg: RunConfig) -> int:
    grid = cfg.sample_grid("s3")
    print(f"# pair={cfg.family_pair} k={cfg.k} grid={grid.describe()}")
    print("a,distance,ratio")
    for a in cfg.a_values:
        u, u0 = bifurcation_pair(cfg.family_pair, a)
        d = ck_distance(u, u0, cfg.k, grid, cfg.threads)
        print(f"{_fmt(a)},{_fmt(d)},{_fmt(d / a)}")
    return 0


def cmd_flowline(cfg: RunConfig) -> int:
    from .dynamics import integrate_flowline, vortex_line

    desc = _family(cfg)
    run = vortex_line if cfg.vortex else integrate_flowline
    traj = run(desc, cfg.start, cfg.dt, cfg.steps)
    if cfg.out:
        traj.write_csv(cfg.out)
    print(f"steps={traj.steps} status={traj.status} b_drift={_fmt(traj.drift('b'))} "
          f"u2_drift={_fmt(traj.drift('u2'))}")
    return 0


def cmd_frames(cfg: RunConfig) -> int:
    chart = cfg.chart or "nil"
    frame = frame_for_chart(chart)
    grid = cfg.sample_grid(frame.chart.name)
    pts = grid.points()
    C = [np.broadcast_to(np.asarray(c, dtype=float), pts.shape[1:])
         for c in J.evaluate(lambda X: frame.at(X).C, pts)]
    gram, res = J.evaluate(lambda X: frame_axiom_residuals(frame.at(X)), pts)
    worst = max(float(np.max(np.abs(v))) for v in (*gram, *res))
    tol = cfg.tol if cfg.tol is not None else 1e-6
    print(f"frame={frame.name} grid={grid.describe()}")
    for name, c in zip(("C0", "C1", "C2"), C):
        print(f"{name}: min={_fmt(c.min())} max={_fmt(c.max())} mean={_fmt(c.mean())}")
    ok = worst <= tol
    print(f"{'PASS' if ok else 'FAIL'} frame axioms: max={worst:.3e} tol={tol:.1e}")
    return 0 if ok else 1


def cmd_export(cfg: RunConfig) -> int:
    desc = _family(cfg)
    grid = cfg.sample_grid(_chart_of(desc))
    pts = grid.points()
    fld = desc.field
    if isinstance(fld, FrameField):
        frame = fld.frame

        def row(X):
            c = frame.at(X)
            u = fld(c)
            return (*u, c.div(u), c.norm2(c.curl(c.covd(u, u))), c.d(u, c.norm2(u)))
        comp_names = ["f", "f1", "f2"]
    else:
        from .charts import ChartPoint

        def row(X):
            c = ChartPoint(fld.chart, X)
            u = tuple(fld(*X))
            return (*u, c.div(u), c.norm2(c.curl(c.covd(u, u))), c.d(u, c.norm2(u)))
        comp_names = ["u1", "u2", "u3"]
    vals = [np.broadcast_to(np.asarray(v, dtype=float), pts.shape[1:]) for v in J.evaluate(row, pts)]
    vals[4] = np.sqrt(np.maximum(vals[4], 0.0))
    labels = grid.spec.labels
    header = [*labels, *comp_names, "div", "euler_residual", "localizability"]
    target = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        w = csv.writer(target)
        w.writerow(header)
        for i in range(pts.shape[1]):
            w.writerow([_fmt(v) for v in (*pts[:, i], *(col[i] for col in vals))])
    finally:
        if cfg.out:
            target.close()
    return 0


DISPATCH = {"verify": cmd_verify, "ck-distance": cmd_ck_distance, "flowline": cmd_flowline,
            "frames": cmd_frames, "export": cmd_export}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"sasakian-euler: error: {exc}", file=sys.stderr)
        return 2
    try:
        return DISPATCH[cfg.command](cfg)
    except (ValueError, KeyError) as exc:
        print(f"sasakian-euler: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
