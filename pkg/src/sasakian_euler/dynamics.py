"""Stream and vortex lines by fixed-step RK4 in chart coordinates."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .charts import ChartPoint, ChartVectorField
from .families import FamilyDescriptor
from .frames import FrameField

S3_BAND = 0.02  # stop when s leaves [S3_BAND, pi/2 - S3_BAND]
OK = "ok"
BOUNDARY_STOP = "boundary-stop"


@dataclass
class Trajectory:
    chart: str
    labels: tuple
    times: list = field(default_factory=list)
    points: list = field(default_factory=list)
    b: list = field(default_factory=list)
    u2: list = field(default_factory=list)
    dt: float = 0.0
    method: str = "rk4"
    status: str = OK

    def __len__(self) -> int:
        return len(self.times)

    @property
    def steps(self) -> int:
        return max(len(self.times) - 1, 0)

    def as_array(self) -> np.ndarray:
        return np.array([[t, *p, b, u] for t, p, b, u in zip(self.times, self.points, self.b, self.u2)])

    def drift(self, column: str = "b") -> float:
        vals = np.asarray(getattr(self, column), dtype=float)
        return float(np.max(np.abs(vals - vals[0]))) if len(vals) else 0.0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *self.labels, "b", "u2"])
            for t, p, b, u in zip(self.times, self.points, self.b, self.u2):
                w.writerow([f"{v:.15g}" for v in (t, *p, b, u)])


def _velocity(field) -> tuple[Callable, Callable, object]:
    """(chart velocity fn, |u|^2 fn, chart) for a frame or chart field."""
    if isinstance(field, FamilyDescriptor):
        field = field.field
    if isinstance(field, FrameField):
        frame = field.frame

        def vel(X):
            fp = frame.at(X)
            return fp.to_chart(field(fp))

        def speed2(X):
            u = field(frame.at(X))
            return J.dot(u, u)
        return vel, speed2, frame.chart
    if isinstance(field, ChartVectorField):
        chart = field.chart

        def vel(X):
            return tuple(field(*X))

        def speed2(X):
            return ChartPoint(chart, X).norm2(tuple(field(*X)))
        return vel, speed2, chart
    raise TypeError(f"not a vector field: {field!r}")


def _curl_velocity(field):
    if isinstance(field, FamilyDescriptor):
        field = field.field
    if isinstance(field, FrameField):
        frame = field.frame
        return FrameField(frame, lambda fp: fp.curl(field(fp)), f"curl({field.label})")
    chart = field.chart
    return ChartVectorField(chart, lambda *X: ChartPoint(chart, X).curl(tuple(field(*X))),
                            f"curl({field.label})")


def _compile(fn, start):
    """Single-point evaluator of fn using the least jet order it needs
    (plain floats when no derivatives are involved)."""
    k = J.required_order(fn, np.asarray(start, dtype=float))

    def run(p):
        X = tuple(float(v) for v in p) if k == 0 else J.lift(np.asarray(p, dtype=float), k)
        out = J.values(fn(X))
        if isinstance(out, tuple):
            return np.array([float(v) for v in out])
        return float(out)
    return run


def _in_domain(chart, p) -> bool:
    if chart.name == "s3":
        return S3_BAND <= p[0] <= math.pi / 2 - S3_BAND
    return bool(chart.contains(np.asarray(p, dtype=float)))


def _wrap(chart, p):
    out = np.array(p, dtype=float)
    for i, per in enumerate(chart.periodic):
        if per:
            lo, hi = chart.ranges[i]
            out[i] = lo + (out[i] - lo) % (hi - lo)
    return out


def integrate_flowline(field, start, dt: float, steps: int, bernoulli: Callable | None = None) -> Trajectory:
    """Classical RK4 for dX/dt = u(X) in chart coordinates.

    Periodic coordinates are wrapped after each step; integration stops with
    status ``boundary-stop`` when the point leaves the sample band.  The state
    update uses compensated summation: at small dt the truncation error of
    RK4 is otherwise buried under accumulated rounding.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if bernoulli is None and isinstance(field, FamilyDescriptor):
        bernoulli = field.bernoulli
    vel, speed2, chart = _velocity(field)
    x = np.asarray(start, dtype=float)
    if not _in_domain(chart, x):
        raise ValueError(f"start point {tuple(x)} is outside the sample domain")
    f = _compile(vel, x)
    sp = _compile(speed2, x)
    bf = _compile(lambda X: bernoulli(*X), x) if bernoulli is not None else (lambda p: math.nan)
    traj = Trajectory(chart.name, chart.labels, dt=dt)

    def record(t, p):
        traj.times.append(t)
        traj.points.append(tuple(float(v) for v in p))
        traj.b.append(float(bf(p)))
        traj.u2.append(float(sp(p)))

    record(0.0, x)
    comp = np.zeros(3)
    for n in range(1, steps + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        inc = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - comp
        nxt = x + inc
        comp = (nxt - x) - inc
        x = nxt
        if not _in_domain(chart, x):
            traj.status = BOUNDARY_STOP
            break
        x = _wrap(chart, x)
        record(n * dt, x)
    return traj


def vortex_line(field, start, dt: float, steps: int, bernoulli: Callable | None = None) -> Trajectory:
    """Integral curve of curl u; b is still monitored."""
    if bernoulli is None and isinstance(field, FamilyDescriptor):
        bernoulli = field.bernoulli
    return integrate_flowline(_curl_velocity(field), start, dt, steps, bernoulli)
