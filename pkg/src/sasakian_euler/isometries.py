"""Orthogonal maps of S^3 in R^4 and how fields transform under them.

Cartesian points are ordered (x1, y1, x2, y2) with
(x1 + i y1, x2 + i y2) = (cos s e^{i phi1}, sin s e^{i phi2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as J
from .errors import AxisPoint, SingularEvaluation
from .frames import FrameField, s3_frame

AXIS_TOL = 1e-14
TWO_PI = 2.0 * math.pi


def hopf_to_cartesian(s, p1, p2):
    cs, sn = J.cos(s), J.sin(s)
    return (cs * J.cos(p1), cs * J.sin(p1), sn * J.cos(p2), sn * J.sin(p2))


def _wrap(phi):
    v = np.asarray(J.value(phi))
    shift = TWO_PI * (v < 0)
    if isinstance(phi, J.Jet):
        return phi + shift
    return phi + shift if np.ndim(phi) else float(phi + shift)


def cartesian_to_hopf(x1, y1, x2, y2):
    """Inverse Hopf coordinates with phi in [0, 2 pi) and s in [0, pi/2].

    Raises AxisPoint where either complex coordinate vanishes.
    """
    q1 = x1 * x1 + y1 * y1
    q2 = x2 * x2 + y2 * y2
    if np.min(J.value(q1)) < AXIS_TOL**2 or np.min(J.value(q2)) < AXIS_TOL**2:
        raise AxisPoint("point lies on an axis circle of the Hopf chart")
    try:
        s = J.atan2(J.sqrt(q2), J.sqrt(q1))
        p1 = J.atan2(y1, x1)
        p2 = J.atan2(y2, x2)
    except SingularEvaluation as exc:
        raise AxisPoint(str(exc)) from exc
    return s, _wrap(p1), _wrap(p2)


def ambient_frame(x1, y1, x2, y2):
    """The global Killing frame (xi, X1, X2) as ambient 4-vectors."""
    xi = (-y1, x1, -y2, x2)
    X1 = (-x2, y2, x1, -y1)
    X2 = (-y2, -x2, y1, x1)
    return xi, X1, X2


def _apply(M, x):
    out = []
    for row in M:
        out.append(J.add(*(J.scale(float(m), xi) for m, xi in zip(row, x))))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class AmbientIsometry:
    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.shape != (4, 4):
            raise ValueError("an ambient isometry is a 4x4 matrix")
        if np.max(np.abs(M.T @ M - np.eye(4))) > 1e-13:
            raise ValueError("matrix is not orthogonal")
        object.__setattr__(self, "matrix", M)

    @property
    def det(self) -> int:
        return int(round(np.linalg.det(self.matrix)))

    def inverse(self) -> "AmbientIsometry":
        return AmbientIsometry(self.matrix.T, f"{self.name}^-1" if self.name else "")

    def __call__(self, x):
        return _apply(self.matrix, x)

    def apply_hopf(self, s, p1, p2):
        return cartesian_to_hopf(*self(hopf_to_cartesian(s, p1, p2)))


_R2 = 1.0 / math.sqrt(2.0)


def psi_map() -> AmbientIsometry:
    M = _R2 * np.array([[1, 0, 0, 1], [0, 1, -1, 0], [0, 1, 1, 0], [-1, 0, 0, 1]], dtype=float)
    return AmbientIsometry(M, "psi")


def mirror_map() -> AmbientIsometry:
    return AmbientIsometry(np.diag([1.0, 1.0, 1.0, -1.0]), "mirror")


def sec43_map() -> AmbientIsometry:
    M = _R2 * np.array([[1, 0, 0, -1], [0, 1, -1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=float)
    return AmbientIsometry(M, "sec43")


def identity_map() -> AmbientIsometry:
    return AmbientIsometry(np.eye(4), "identity")


ISOMETRIES = {"psi": psi_map, "mirror": mirror_map, "sec43": sec43_map, "identity": identity_map}


def isometry_from_tag(tag: str) -> AmbientIsometry:
    """A named isometry or a literal of 16 row-major numbers."""
    if tag in ISOMETRIES:
        return ISOMETRIES[tag]()
    nums = [float(v) for v in tag.replace(",", " ").split()]
    if len(nums) != 16:
        raise ValueError(f"expected an isometry name or 16 numbers, got {tag!r}")
    return AmbientIsometry(np.array(nums).reshape(4, 4), "literal")


# -- scalars ----------------------------------------------------------------


def pullback_scalar(iso: AmbientIsometry, f: Callable) -> Callable:
    """f o Q, both sides in Hopf coordinates."""
    def g(s, p1, p2):
        return J.compose_through(f, iso.apply_hopf(s, p1, p2))
    return g


def pullback_cartesian(iso: AmbientIsometry, f: Callable) -> Callable:
    """f o Q for a function of the Cartesian coordinates."""
    return lambda *x: f(*iso(x))


# -- vector fields ----------------------------------------------------------


@dataclass(frozen=True)
class AmbientVectorField:
    """Vector field on S^3 given by its four Cartesian components."""

    components: Callable  # (x1, y1, x2, y2) -> 4-tuple
    label: str = ""

    def __call__(self, *x):
        return self.components(*x)

    def to_frame_field(self) -> FrameField:
        def comps(fp):
            x = hopf_to_cartesian(*fp.X)
            V = self(*x)
            return tuple(J.dot(V, E) for E in ambient_frame(*x))
        return FrameField(s3_frame(), comps, label=self.label)


def ambient_from_frame(u: FrameField) -> AmbientVectorField:
    """Ambient components of a Hopf-frame field (singular on the axis circles
    only through the field's own Hopf-coordinate expressions)."""
    frame = s3_frame()

    def comps(*x):
        f = J.compose_through(lambda *h: u(frame.at(h)), cartesian_to_hopf(*x))
        E = ambient_frame(*x)
        return tuple(J.add(*(J.scale(f[a], E[a][k]) for a in range(3))) for k in range(4))
    return AmbientVectorField(comps, label=u.label)


def pushforward_vector(iso: AmbientIsometry, u: FrameField) -> FrameField:
    """Q_* u, re-expressed in the Hopf frame: (Q_* u)(y) = Q u(Q^-1 y)."""
    frame = s3_frame()
    Qinv = iso.inverse()
    amb = ambient_from_frame(u)

    def comps(fp):
        y = hopf_to_cartesian(*fp.X)
        V = iso(amb(*Qinv(y)))
        return tuple(J.dot(V, E) for E in ambient_frame(*y))
    return FrameField(frame, comps, label=f"{iso.name}_*({u.label})")


def check_equivalence(iso: AmbientIsometry, u: FrameField, v: FrameField, grid=None, tol: float = 1e-9,
                      threads: int = 1):
    """Sup over the grid of |Q_* u - v|."""
    from .grids import SampleGrid, report

    grid = grid or SampleGrid()
    pushed = pushforward_vector(iso, u)
    frame = s3_frame()

    def fn(X):
        fp = frame.at(X)
        a, b = pushed(fp), v(fp)
        d = tuple(J.add(a[i], -J.scale(1.0, b[i])) for i in range(3))
        return J.dot(d, d)
    return report(f"equivalence[{iso.name}]", fn, grid, tol, threads, post="sqrt")
