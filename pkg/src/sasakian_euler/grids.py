"""Sample grids, residual reports and the sup-norm sweep used by every check."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import jets as J
from .charts import ChartSpec, get_chart, grid_points

CHUNK = 4096
REFINE_POINTS = 11  # per axis, spacing h/5 around the argmax


@dataclass(frozen=True)
class SampleGrid:
    chart: str = "s3"
    counts: tuple = (24, 24, 24)
    ranges: tuple | None = None
    margin: float | None = None  # S3 only: s in [margin, pi/2 - margin]
    random_count: int = 0
    seed: int = 0

    @property
    def spec(self) -> ChartSpec:
        return get_chart(self.chart)

    def resolved_ranges(self) -> tuple:
        rng = list(self.ranges or self.spec.ranges)
        if self.margin is not None:
            if self.spec.name != "s3":
                raise ValueError("margin only applies to the s3 chart")
            rng[0] = (self.margin, math.pi / 2 - self.margin)
        return tuple(tuple(float(v) for v in r) for r in rng)

    def spacing(self) -> np.ndarray:
        out = []
        for (lo, hi), n, per in zip(self.resolved_ranges(), self.counts, self.spec.periodic):
            steps = n if per else max(n - 1, 1)
            out.append((hi - lo) / steps)
        return np.array(out)

    def points(self) -> np.ndarray:
        pts = grid_points(self.spec, self.counts, self.resolved_ranges())
        if self.random_count:
            rng = np.random.default_rng(self.seed)
            lo = np.array([r[0] for r in self.resolved_ranges()])
            hi = np.array([r[1] for r in self.resolved_ranges()])
            extra = lo[:, None] + (hi - lo)[:, None] * rng.random((3, self.random_count))
            pts = np.concatenate([pts, extra], axis=1)
        return pts

    def refinement(self, centre) -> np.ndarray:
        """A 5x finer local grid (11 points per axis) around ``centre``."""
        h = self.spacing()
        offs = np.linspace(-1.0, 1.0, REFINE_POINTS)
        axes = []
        for i, ((lo, hi), per) in enumerate(zip(self.resolved_ranges(), self.spec.periodic)):
            ax = centre[i] + h[i] * offs
            if not per:
                ax = np.unique(np.clip(ax, lo, hi))
            axes.append(ax)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh])

    def describe(self) -> str:
        return f"{self.chart} {'x'.join(str(n) for n in self.counts)}"


@dataclass
class ResidualReport:
    check: str
    max_residual: float
    mean_residual: float
    argmax: tuple
    tolerance: float
    passed: bool
    parts: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def combine(cls, check: str, parts: list, tolerance: float) -> "ResidualReport":
        worst = max(parts, key=lambda r: r.max_residual)
        return cls(check, worst.max_residual, max(r.mean_residual for r in parts),
                   worst.argmax, tolerance, all(r.passed for r in parts), list(parts))

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "max_residual": _sig(self.max_residual),
            "mean_residual": _sig(self.mean_residual),
            "argmax": [_sig(v) for v in self.argmax],
            "tolerance": _sig(self.tolerance),
            "pass": bool(self.passed),
        }
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.check}: max={self.max_residual:.3e} tol={self.tolerance:.1e}"


def _sig(x: float) -> float:
    """Round to 15 significant digits so reports are byte-stable."""
    x = float(x)
    if not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.15g}")


POST = {
    None: lambda v: v,
    "abs": np.abs,
    "sqrt": lambda v: np.sqrt(np.maximum(v, 0.0)),  # fn returns a squared norm
}


def sample(fn, pts, threads: int = 1, order: int | None = None, post=None) -> np.ndarray:
    """Evaluate the scalar ``fn(X)`` at every column of ``pts``.

    ``fn`` must return the raw (jet) expression so the derivative order can be
    probed once; ``post`` maps base values to residual magnitudes.  Points are
    processed in chunks, optionally on a thread pool (results are identical
    either way).
    """
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[1]
    if n == 0:
        return np.zeros(0)
    if order is None:
        order = J.required_order(fn, pts[:, 0])
    chunks = [pts[:, i:i + CHUNK] for i in range(0, n, CHUNK)]

    def run(chunk):
        out = POST[post](np.asarray(J.evaluate(fn, chunk, order), dtype=float))
        return np.broadcast_to(out, chunk.shape[1:]).copy()

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    vals = np.concatenate(parts)
    return np.where(np.isfinite(vals), vals, np.inf)


def sup(fn, grid: SampleGrid, threads: int = 1, refine: bool = True, post="abs"):
    """(max, mean, argmax) of the nonnegative quantity fn over the grid, the
    max taken after one local refinement pass."""
    pts = grid.points()
    order = J.required_order(fn, pts[:, 0])
    vals = sample(fn, pts, threads, order, post)
    i = int(np.argmax(vals))
    best, where = float(vals[i]), pts[:, i]
    mean = float(np.mean(vals))
    if refine and math.isfinite(best):
        local = grid.refinement(where)
        lv = sample(fn, local, threads, order, post)
        j = int(np.argmax(lv))
        if lv[j] > best:
            best, where = float(lv[j]), local[:, j]
    return best, mean, tuple(float(v) for v in where)


def report(check: str, fn, grid: SampleGrid, tol: float, threads: int = 1,
           refine: bool = True, post="abs") -> ResidualReport:
    mx, mean, where = sup(fn, grid, threads, refine, post)
    return ResidualReport(check, mx, mean, where, tol, mx <= tol)
