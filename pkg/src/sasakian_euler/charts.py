"""Coordinate charts of the four model spaces and the Christoffel-symbol
calculus on them.

Everything here works directly with the metric coefficients g_ij, so it serves
as an independent check on the orthonormal-frame formulas in
:mod:`sasakian_euler.frames`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import jets as J
from .errors import NearSingular, OutsideDomain, UnknownTag

PI = math.pi
COND_LIMIT = 1e12

# Levi-Civita symbol as (i, j, k, sign) for the six non-zero entries
_EPS = ((0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
        (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0))


@dataclass(frozen=True)
class ChartSpec:
    name: str
    labels: tuple[str, str, str]
    metric: Callable  # (x, y, z) -> 3x3 nested tuple of scalar fields
    orientation: float  # sign of the volume form relative to coordinate order
    domain: Callable  # array (3, ...) -> bool array
    ranges: tuple  # default sample ranges per coordinate
    periodic: tuple[bool, bool, bool]

    def contains(self, p) -> np.ndarray:
        return self.domain(np.asarray(p, dtype=float))

    def __repr__(self) -> str:
        return f"ChartSpec({self.name!r})"


@dataclass(frozen=True)
class Point3:
    chart: str
    coords: tuple[float, float, float]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or float)


def _s3_metric(s, p1, p2):
    c, sn = J.cos(s), J.sin(s)
    return ((1.0, 0.0, 0.0), (0.0, c * c, 0.0), (0.0, 0.0, sn * sn))


def _h3_metric(x, y, z):
    w = 1.0 / (z * z)
    return ((w, 0.0, 0.0), (0.0, w, 0.0), (0.0, 0.0, w))


def _nil_metric(x, y, z):
    # pi (dx^2 + dy^2) + 4 pi^2 (dz - x dy)^2
    k = 4.0 * PI * PI
    return ((PI, 0.0, 0.0),
            (0.0, PI + k * x * x, -k * x),
            (0.0, -k * x, k))


def _sl2_metric(x, y, t):
    # (dx^2 + dy^2) / (2 y^2) + (2 dtheta + dx / y)^2
    iy = 1.0 / y
    return ((1.5 * iy * iy, 0.0, 2.0 * iy),
            (0.0, 0.5 * iy * iy, 0.0),
            (2.0 * iy, 0.0, 4.0))


S3 = ChartSpec(
    name="s3",
    labels=("s", "phi1", "phi2"),
    metric=_s3_metric,
    # the adapted frame (xi, X1, X2) is negatively oriented in (s, phi1, phi2)
    orientation=-1.0,
    domain=lambda p: (p[0] > 0.0) & (p[0] < PI / 2),
    ranges=((0.05, PI / 2 - 0.05), (0.0, 2 * PI), (0.0, 2 * PI)),
    periodic=(False, True, True),
)

H3 = ChartSpec(
    name="h3",
    labels=("x", "y", "z"),
    metric=_h3_metric,
    orientation=1.0,
    domain=lambda p: p[2] > 0.0,
    ranges=((-1.0, 1.0), (-1.0, 1.0), (0.5, 2.0)),
    periodic=(False, False, False),
)

NIL = ChartSpec(
    name="nil",
    labels=("x", "y", "z"),
    metric=_nil_metric,
    orientation=-1.0,
    domain=lambda p: np.ones(np.shape(p)[1:], dtype=bool),
    ranges=((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
    periodic=(True, True, True),
)

SL2 = ChartSpec(
    name="sl2",
    labels=("x", "y", "theta"),
    metric=_sl2_metric,
    orientation=1.0,
    domain=lambda p: p[1] > 0.0,
    ranges=((-1.0, 1.0), (0.5, 2.0), (0.0, 2 * PI)),
    periodic=(False, False, True),
)

CHARTS = {c.name: c for c in (S3, H3, NIL, SL2)}


def get_chart(name: str) -> ChartSpec:
    try:
        return CHARTS[name]
    except KeyError:
        raise UnknownTag(f"unknown chart {name!r}; expected one of {sorted(CHARTS)}") from None


def _check_point(chart: ChartSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not np.all(chart.contains(p)):
        raise OutsideDomain(f"point outside the {chart.name} chart domain")
    return p


def metric_at(chart: ChartSpec, p) -> np.ndarray:
    """Numeric 3x3 metric at a single point."""
    p = _check_point(chart, p)
    g = np.array([[float(J.value(e)) for e in row] for row in chart.metric(*p)])
    if np.linalg.cond(g) > COND_LIMIT:
        raise NearSingular(f"metric condition number above {COND_LIMIT:g} at {p}")
    return g


@dataclass(frozen=True)
class ChartVectorField:
    """Vector field given by its coordinate components."""

    chart: ChartSpec
    components: Callable  # (x, y, z) -> (u0, u1, u2)
    label: str = ""

    def __call__(self, *X):
        return self.components(*X)


# -- calculus at a (lifted) point -----------------------------------------


def _inverse3(g):
    a, b, c = g[0]
    _, e, f = g[1]
    _, _, i = g[2]
    # symmetric matrix: cofactors
    A = J.dot((e,), (i,)) - J.dot((f,), (f,))
    B = J.dot((c,), (f,)) - J.dot((b,), (i,))
    C = J.dot((b,), (f,)) - J.dot((c,), (e,))
    E = J.dot((a,), (i,)) - J.dot((c,), (c,))
    F = J.dot((b,), (c,)) - J.dot((a,), (f,))
    I = J.dot((a,), (e,)) - J.dot((b,), (b,))
    det = a * A + J.dot((b, c), (B, C))
    inv_det = 1.0 / det
    cof = ((A, B, C), (B, E, F), (C, F, I))
    ginv = tuple(tuple(0.0 if J.is_zero(x) else x * inv_det for x in row) for row in cof)
    return ginv, det


class ChartPoint:
    """Metric data at lifted coordinates ``X`` plus the chart-side operators.

    Vector arguments are triples of coordinate components (jets or numbers)
    already evaluated at ``X``.
    """

    def __init__(self, chart: ChartSpec, X):
        self.chart = chart
        self.X = X
        self.g = chart.metric(*X)

    @cached_property
    def _inv(self):
        return _inverse3(self.g)

    @property
    def ginv(self):
        return self._inv[0]

    @cached_property
    def sqrt_det(self):
        return J.sqrt(self._inv[1])

    @cached_property
    def dg(self):
        # dg[l][i][j] = d_l g_ij
        return [[[J.diff(self.g[i][j], l) for j in range(3)] for i in range(3)] for l in range(3)]

    @cached_property
    def gamma(self):
        """Gamma[k][i][j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)."""
        dg = self.dg
        lower = [[[None] * 3 for _ in range(3)] for _ in range(3)]  # Gamma_{l i j}
        for l in range(3):
            for i in range(3):
                for j in range(i, 3):
                    terms = [dg[i][j][l], dg[j][i][l], -dg[l][i][j] if not J.is_zero(dg[l][i][j]) else 0.0]
                    val = 0.0
                    for t in terms:
                        if not J.is_zero(t):
                            val = t if J.is_zero(val) else val + t
                    val = 0.0 if J.is_zero(val) else 0.5 * val
                    lower[l][i][j] = lower[l][j][i] = val
        out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for k in range(3):
            for i in range(3):
                for j in range(i, 3):
                    v = J.dot(self.ginv[k], [lower[l][i][j] for l in range(3)])
                    out[k][i][j] = out[k][j][i] = v
        return out

    # scalar and vector operations

    def lower(self, u):
        return tuple(J.dot(self.g[k], u) for k in range(3))

    def raise_(self, w):
        return tuple(J.dot(self.ginv[k], w) for k in range(3))

    def inner(self, u, v):
        return J.dot(self.lower(u), v)

    def norm2(self, u):
        return self.inner(u, u)

    def d(self, u, f):
        """Directional derivative u(f)."""
        return J.dot(u, [J.diff(f, i) for i in range(3)])

    def grad(self, f):
        return self.raise_([J.diff(f, i) for i in range(3)])

    def div(self, u):
        r = self.sqrt_det
        return J.dot([1.0] * 3, [J.diff(r * u[i], i) if not J.is_zero(u[i]) else 0.0 for i in range(3)]) / r

    def laplacian(self, f):
        return -self.div(self.grad(f))

    def curl(self, u):
        w = self.lower(u)
        sig = self.chart.orientation / self.sqrt_det
        out = [0.0, 0.0, 0.0]
        for i, j, k, s in _EPS:
            t = J.diff(w[k], j)
            if J.is_zero(t):
                continue
            out[i] = s * t if J.is_zero(out[i]) else out[i] + s * t
        return tuple(0.0 if J.is_zero(o) else sig * o for o in out)

    def covd(self, u, v):
        """(nabla_u v)^k = u^i d_i v^k + Gamma^k_ij u^i v^j."""
        G = self.gamma
        out = []
        for k in range(3):
            term = self.d(u, v[k])
            for i in range(3):
                if J.is_zero(u[i]):
                    continue
                gv = J.dot(G[k][i], v)
                if not J.is_zero(gv):
                    term = u[i] * gv if J.is_zero(term) else term + u[i] * gv
            out.append(term)
        return tuple(out)

    def bracket(self, u, v):
        return tuple(self.d(u, v[k]) - self.d(v, u[k]) for k in range(3))

    def cross(self, u, v):
        """(u x v)^i = sigma g^{il} sqrt(det g) eps_{ljk} u^j v^k."""
        low = [0.0, 0.0, 0.0]
        for l, j, k, s in _EPS:
            if J.is_zero(u[j]) or J.is_zero(v[k]):
                continue
            t = s * (u[j] * v[k])
            low[l] = t if J.is_zero(low[l]) else low[l] + t
        scale = self.chart.orientation * self.sqrt_det
        low = [0.0 if J.is_zero(x) else scale * x for x in low]
        return self.raise_(low)


# -- point-level public operations ----------------------------------------


def _numeric(x):
    return np.asarray(J.value(x), dtype=float)


def christoffel_at(chart: ChartSpec, p) -> np.ndarray:
    """Gamma^k_ij at a point as an array indexed [k, i, j]."""
    p = _check_point(chart, p)
    metric_at(chart, p)
    cp = ChartPoint(chart, J.lift(p, 1))
    return np.array([[[float(_numeric(cp.gamma[k][i][j])) for j in range(3)]
                      for i in range(3)] for k in range(3)])


def _vector_op_at(chart, p, fn):
    p = _check_point(chart, p)
    metric_at(chart, p)
    out = J.evaluate(lambda X: fn(ChartPoint(chart, X), X), p)
    return np.asarray(out, dtype=float) if isinstance(out, tuple) else float(out)


def covariant_derivative_chart(chart: ChartSpec, u, v, p) -> np.ndarray:
    return _vector_op_at(chart, p, lambda cp, X: cp.covd(u(*X), v(*X)))


def grad_chart(chart: ChartSpec, f, p) -> np.ndarray:
    return _vector_op_at(chart, p, lambda cp, X: cp.grad(f(*X)))


def div_chart(chart: ChartSpec, u, p) -> float:
    return _vector_op_at(chart, p, lambda cp, X: cp.div(u(*X)))


def curl_chart(chart: ChartSpec, u, p) -> np.ndarray:
    return _vector_op_at(chart, p, lambda cp, X: cp.curl(u(*X)))


def laplacian_chart(chart: ChartSpec, f, p) -> float:
    return _vector_op_at(chart, p, lambda cp, X: cp.laplacian(f(*X)))


def grid_points(chart: ChartSpec, counts, ranges=None) -> np.ndarray:
    """Tensor-product sample points, shape (3, N).  Periodic coordinates omit
    the right endpoint."""
    ranges = ranges or chart.ranges
    axes = []
    for (lo, hi), n, per in zip(ranges, counts, chart.periodic):
        axes.append(np.linspace(lo, hi, int(n), endpoint=not per))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh])
