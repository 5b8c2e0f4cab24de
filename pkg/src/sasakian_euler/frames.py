"""Adapted orthonormal frames {xi, X1, X2} and the vector calculus written in
them.

Components of a vector field are always taken with respect to the frame:
``u = f xi + f1 X1 + f2 X2`` is the triple ``(f, f1, f2)``.  All operators are
evaluated through a :class:`FramePoint`, which bundles the frame vectors (as
chart components) and the structure functions at lifted coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import jets as J
from .charts import S3, ChartPoint, ChartSpec, ChartVectorField, grid_points
from .errors import DegenerateSeed, FrameInconsistent, UnknownTag

XI, E1, E2 = 0, 1, 2


@dataclass(frozen=True)
class SasakianFrameSpec:
    """Frame vectors on a chart plus (optionally) their structure functions.

    ``vectors(cp)`` returns the chart components of (xi, X1, X2) at the
    ChartPoint ``cp``; ``structure(fp)`` returns (C0, C1, C2) at a FramePoint.
    A frame without ``structure`` can be evaluated and used as a basis but has
    no connection table.
    """

    name: str
    chart: ChartSpec
    vectors: Callable
    structure: Callable | None = None

    def at(self, X) -> "FramePoint":
        return FramePoint(self, X)

    def __repr__(self) -> str:
        return f"SasakianFrameSpec({self.name!r})"


class FramePoint:
    def __init__(self, frame: SasakianFrameSpec, X):
        self.frame = frame
        self.X = X
        self.cp = ChartPoint(frame.chart, X)
        self.E = frame.vectors(self.cp)

    @cached_property
    def C(self):
        if self.frame.structure is None:
            raise TypeError(f"frame {self.frame.name!r} has no structure functions")
        return self.frame.structure(self)

    # -- basis conversion ---------------------------------------------------

    def to_chart(self, u):
        return tuple(J.add(*(J.scale(u[a], self.E[a][k]) for a in range(3))) for k in range(3))

    def from_chart(self, v):
        return tuple(self.cp.inner(v, self.E[a]) for a in range(3))

    # -- derivatives --------------------------------------------------------

    def e(self, a: int, f):
        """Directional derivative of the scalar ``f`` along frame vector a."""
        return self.cp.d(self.E[a], f)

    def d(self, u, f):
        """u(f) for u given in frame components."""
        return J.add(*(J.scale(u[a], self.e(a, f)) for a in range(3)))

    def connection(self, a: int, b: int):
        """Frame components of nabla_{e_a} e_b."""
        C0, C1, C2 = self.C
        table = (
            ((0.0, 0.0, 0.0), (0.0, 0.0, -C0), (0.0, C0, 0.0)),
            ((0.0, 0.0, 1.0), (0.0, 0.0, -C1), (-1.0, C1, 0.0)),
            ((0.0, -1.0, 0.0), (1.0, 0.0, -C2), (0.0, C2, 0.0)),
        )
        return table[a][b]

    # -- operators ----------------------------------------------------------

    def div(self, u):
        f, f1, f2 = u
        C0, C1, C2 = self.C
        return J.add(self.e(XI, f), self.e(E1, f1), self.e(E2, f2),
                     -J.scale(C2, f1), J.scale(C1, f2))

    def curl(self, u):
        f, f1, f2 = u
        C0, C1, C2 = self.C
        k = C0 + 1.0
        return (
            J.add(self.e(E1, f2), -self.e(E2, f1), -J.scale(C1, f1), -J.scale(C2, f2), J.scale(2.0, f)),
            J.add(-self.e(XI, f2), self.e(E2, f), J.scale(k, f1)),
            J.add(self.e(XI, f1), -self.e(E1, f), J.scale(k, f2)),
        )

    def covd(self, u, v):
        """nabla_u v, both in frame components."""
        out = [0.0, 0.0, 0.0]
        for a in range(3):
            if J.is_zero(u[a]):
                continue
            for c in range(3):
                term = self.e(a, v[c])
                for b in range(3):
                    term = J.add(term, J.scale(v[b], self.connection(a, b)[c]))
                out[c] = J.add(out[c], J.scale(u[a], term))
        return tuple(out)

    def grad(self, f):
        return (self.e(XI, f), self.e(E1, f), self.e(E2, f))

    def laplacian(self, f):
        return -self.div(self.grad(f))

    def bracket(self, u, v):
        a, b = self.covd(u, v), self.covd(v, u)
        return tuple(J.add(a[i], -b[i]) for i in range(3))

    @staticmethod
    def inner(u, v):
        return J.dot(u, v)

    @staticmethod
    def norm2(u):
        return J.dot(u, u)

    @staticmethod
    def cross(u, v):
        return (
            J.add(J.scale(u[1], v[2]), -J.scale(u[2], v[1])),
            J.add(J.scale(u[2], v[0]), -J.scale(u[0], v[2])),
            J.add(J.scale(u[0], v[1]), -J.scale(u[1], v[0])),
        )

    @staticmethod
    def phi(u):
        # phi xi = 0, phi X1 = -X2, phi X2 = X1
        return (0.0, u[2], -u[1] if not J.is_zero(u[1]) else 0.0)


@dataclass(frozen=True)
class FrameField:
    """Vector field given by its frame components ``components(fp)``."""

    frame: SasakianFrameSpec
    components: Callable
    label: str = ""

    def __call__(self, fp: FramePoint):
        return self.components(fp)

    def to_chart(self) -> ChartVectorField:
        frame = self.frame
        return ChartVectorField(frame.chart, lambda *X: (lambda fp: fp.to_chart(self(fp)))(frame.at(X)),
                                label=self.label)


def from_chart_field(frame: SasakianFrameSpec, v: ChartVectorField, label: str = "") -> FrameField:
    return FrameField(frame, lambda fp: fp.from_chart(v(*fp.X)), label=label or v.label)


# -- the 3-sphere --------------------------------------------------------------


def _hopf_vectors(cp):
    s, p1, p2 = cp.X
    sn, cs = J.sin(s), J.cos(s)
    t, ct = sn / cs, cs / sn
    a = p1 + p2
    ca, sa = J.cos(a), J.sin(a)
    xi = (0.0, 1.0, 1.0)
    X1 = (ca, sa * t, -(sa * ct))
    X2 = (sa, -(ca * t), ca * ct)
    return xi, X1, X2


def _primed_vectors(cp):
    s, p1, p2 = cp.X
    sn, cs = J.sin(s), J.cos(s)
    t, ct = sn / cs, cs / sn
    a = p1 - p2
    ca, sa = J.cos(a), J.sin(a)
    xi = (0.0, 1.0, -1.0)
    X1 = (ca, sa * t, sa * ct)
    X2 = (sa, -(ca * t), -(ca * ct))
    return xi, X1, X2


def _s3_structure(fp):
    return (1.0, 0.0, 0.0)


_S3_FRAME = SasakianFrameSpec("s3-hopf", S3, _hopf_vectors, _s3_structure)
_S3_PRIMED = SasakianFrameSpec("s3-hopf-primed", S3, _primed_vectors, None)


def s3_frame() -> SasakianFrameSpec:
    return _S3_FRAME


def s3_primed_frame() -> SasakianFrameSpec:
    return _S3_PRIMED


def primed_components(fp: FramePoint):
    """(xi', X1', X2') expressed in the components of the frame at ``fp``."""
    primed = _primed_vectors(fp.cp)
    return tuple(fp.from_chart(v) for v in primed)


# -- frames derived from a Reeb field and a seed ------------------------------


def _commutator_structure(fp: FramePoint):
    cp = fp.cp
    xi, X1, X2 = fp.E
    b01 = cp.bracket(xi, X1)
    b12 = cp.bracket(X1, X2)
    C0 = -cp.inner(b01, X2) - 1.0
    C1 = cp.inner(b12, X1)
    C2 = cp.inner(b12, X2)
    return C0, C1, C2


def _derived_vectors(xi_field, seed_field):
    def vectors(cp):
        X = cp.X
        xi = tuple(xi_field(*X))
        seed = tuple(seed_field(*X))
        proj = cp.inner(seed, xi)
        w = tuple(J.add(seed[k], -J.scale(proj, xi[k])) for k in range(3))
        X1 = tuple(J.scale(x, 1.0 / J.sqrt(cp.norm2(w))) for x in w)
        # nabla_{X1} xi = X2 in an adapted frame
        X2 = cp.covd(X1, xi)
        return xi, X1, X2
    return vectors


def frame_axiom_residuals(fp: FramePoint, structure=None):
    """Orthonormality defects and structure-equation residuals at ``fp``.

    Returns (orthonormality, brackets): six Gram-matrix defects and nine
    frame components of
    [xi,X1] + (C0+1) X2, [X1,X2] + 2 xi - C1 X1 - C2 X2, [X2,xi] + (C0+1) X1.
    """
    cp = fp.cp
    E = fp.E
    gram = []
    for a in range(3):
        for b in range(a, 3):
            gram.append(J.add(cp.inner(E[a], E[b]), -1.0 if a == b else 0.0))
    C0, C1, C2 = structure if structure is not None else fp.C
    k = C0 + 1.0
    b01 = fp.from_chart(cp.bracket(E[0], E[1]))
    b12 = fp.from_chart(cp.bracket(E[1], E[2]))
    b20 = fp.from_chart(cp.bracket(E[2], E[0]))
    res = [
        b01[0], b01[1], J.add(b01[2], J.scale(k, 1.0)),
        J.add(b12[0], 2.0), J.add(b12[1], -J.scale(C1, 1.0)), J.add(b12[2], -J.scale(C2, 1.0)),
        b20[0], J.add(b20[1], J.scale(k, 1.0)), b20[2],
    ]
    return tuple(gram), tuple(res)


def derive_adapted_frame(chart: ChartSpec, xi: Callable, seed_X1: Callable,
                         n: int = 8, tol: float = 1e-6, name: str | None = None) -> SasakianFrameSpec:
    """Build {xi, X1, X2} from a unit Killing field and a seed direction.

    X1 is the normalized part of the seed orthogonal to xi and X2 is
    nabla_{X1} xi from the Christoffel symbols; structure functions are read
    off the commutators pointwise.  The result is validated on an ``n``^3
    sample grid.
    """
    frame = SasakianFrameSpec(name or f"{chart.name}-derived", chart,
                              _derived_vectors(xi, seed_X1), _commutator_structure)
    pts = grid_points(chart, (n, n, n))

    def seed_defect(X):
        cp = ChartPoint(chart, X)
        x, s = tuple(xi(*X)), tuple(seed_X1(*X))
        proj = cp.inner(s, x)
        w = tuple(J.add(s[k], -J.scale(proj, x[k])) for k in range(3))
        return cp.norm2(w)

    w2 = np.broadcast_to(J.evaluate(seed_defect, pts), pts.shape[1:])
    if np.min(np.sqrt(np.abs(w2))) < 1e-8:
        raise DegenerateSeed("seed is parallel to xi somewhere on the sample grid")

    gram, res = J.evaluate(lambda X: frame_axiom_residuals(frame.at(X)), pts)
    worst = max(np.max(np.abs(v)) for v in (*gram, *res))
    if worst > tol:
        raise FrameInconsistent(f"derived frame violates its axioms by {worst:.3g}")
    return frame


def nil_frame() -> SasakianFrameSpec:
    """Adapted frame on the Heisenberg chart with xi = d_z / (2 pi), seed d_x."""
    return _cached("nil")


def sl2_frame() -> SasakianFrameSpec:
    """Adapted frame on the SL(2, R) chart with xi = d_theta / 2, seed d_y."""
    return _cached("sl2")


_FRAMES: dict = {}


def _cached(name):
    from .charts import NIL, SL2

    if name not in _FRAMES:
        if name == "nil":
            _FRAMES[name] = derive_adapted_frame(
                NIL, lambda x, y, z: (0.0, 0.0, 1.0 / (2 * np.pi)), lambda x, y, z: (1.0, 0.0, 0.0),
                name="nil-derived")
        else:
            _FRAMES[name] = derive_adapted_frame(
                SL2, lambda x, y, t: (0.0, 0.0, 0.5), lambda x, y, t: (0.0, 1.0, 0.0),
                name="sl2-derived")
    return _FRAMES[name]


def frame_for_chart(name: str) -> SasakianFrameSpec:
    if name == "s3":
        return s3_frame()
    if name in ("nil", "sl2"):
        return _cached(name)
    raise UnknownTag(f"no Sasakian frame on chart {name!r}")


# -- point-level operations ---------------------------------------------------


def _at(frame, p, fn):
    out = J.evaluate(lambda X: fn(frame.at(X)), np.asarray(p, dtype=float))
    return np.asarray(out, dtype=float) if isinstance(out, tuple) else float(out)


def div_frame(frame: SasakianFrameSpec, u: FrameField, p) -> float:
    return _at(frame, p, lambda fp: fp.div(u(fp)))


def curl_frame(frame: SasakianFrameSpec, u: FrameField, p) -> np.ndarray:
    return _at(frame, p, lambda fp: fp.curl(u(fp)))


def covd_frame(frame: SasakianFrameSpec, u: FrameField, v: FrameField, p) -> np.ndarray:
    return _at(frame, p, lambda fp: fp.covd(u(fp), v(fp)))


def grad_frame(frame: SasakianFrameSpec, f: Callable, p) -> np.ndarray:
    return _at(frame, p, lambda fp: fp.grad(f(*fp.X)))


def laplacian_frame(frame: SasakianFrameSpec, f: Callable, p) -> float:
    return _at(frame, p, lambda fp: fp.laplacian(f(*fp.X)))


def apply_phi(frame: SasakianFrameSpec, u: FrameField) -> FrameField:
    return FrameField(frame, lambda fp: FramePoint.phi(u(fp)), label=f"phi({u.label})")
