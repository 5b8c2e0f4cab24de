"""Constructors for the steady Euler solution families.

Every constructor returns a :class:`FamilyDescriptor` carrying the field and
whatever closed forms are known for it (Bernoulli function, pressure,
localizability density u(|u|^2), Beltrami eigenvalue).  Scalar closed forms
are callables of the chart coordinates and accept jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import jets as J
from .charts import H3, ChartVectorField, get_chart
from .errors import BothParametersZero, PreconditionViolated, UnknownTag
from .frames import FrameField, SasakianFrameSpec, primed_components, s3_frame
from .profiles import IDENTITY, Profile, as_profile

XI_TOL = 1e-9


@dataclass(frozen=True)
class FamilyDescriptor:
    tag: str
    params: dict
    chart: str
    field: FrameField | ChartVectorField
    bernoulli: Callable | None = None
    pressure: Callable | None = None
    localizability: Callable | None = None
    mu: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def frame(self) -> SasakianFrameSpec | None:
        return self.field.frame if isinstance(self.field, FrameField) else None

    def describe(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.tag}({args})"


def _profile_const(p: Profile) -> float | None:
    poly = p.poly
    if poly is None:
        return None
    c = poly.trim().coef
    return float(c[0]) if len(c) == 1 else None


def _same_poly(p: Profile, coeffs) -> bool:
    poly = p.poly
    if poly is None:
        return False
    a = np.trim_zeros(poly.coef, "b")
    b = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return len(a) == len(b) and np.allclose(a, b, rtol=0, atol=1e-14)


# -- KKPS and the half-space analogue -------------------------------------------


def kkps(A, B) -> FamilyDescriptor:
    """u = A(cos^2 s) xi + B(cos^2 s) xi' on S^3."""
    A, B = as_profile(A), as_profile(B)

    def comps(fp):
        s, p1, p2 = fp.X
        c = J.cos(s) ** 2
        a, b = A(c), B(c)
        sig = p1 + p2
        s2 = J.sin(2.0 * s)
        return (J.add(a, J.scale(b, J.cos(2.0 * s))),
                J.scale(b, s2 * J.sin(sig)),
                -J.scale(b, s2 * J.cos(sig)))

    a0, b0 = _profile_const(A), _profile_const(B)
    mu = None
    if b0 == 0.0 and a0 is not None and a0 != 0.0:
        mu = 2.0
    elif a0 == 0.0 and b0 is not None and b0 != 0.0:
        mu = -2.0
    # localizable: u(|u|^2) vanishes identically
    return FamilyDescriptor("kkps", {"A": str(A), "B": str(B)}, "s3",
                            FrameField(s3_frame(), comps, f"kkps({A}, {B})"),
                            localizability=lambda s, p1, p2: 0.0, mu=mu)


def hyperbolic(A, B) -> FamilyDescriptor:
    """u = A(z) d_x + B(z) d_y on the upper half-space."""
    A, B = as_profile(A), as_profile(B)
    vf = ChartVectorField(H3, lambda x, y, z: (A(z), B(z), 0.0), f"hyperbolic({A}, {B})")
    return FamilyDescriptor("hyperbolic", {"A": str(A), "B": str(B)}, "h3", vf,
                            localizability=lambda x, y, z: 0.0)


# -- the Sasakian ansatz ------------------------------------------------------


def xi_derivative_max(frame: SasakianFrameSpec, psi: Callable, n: int = 8) -> float:
    from .charts import grid_points

    pts = grid_points(frame.chart, (n, n, n))
    vals = J.evaluate(lambda X: frame.at(X).e(0, psi(*X)), pts)
    return float(np.max(np.abs(vals)))


def sasakian_ansatz(frame: SasakianFrameSpec, F, G, psi: Callable, calG=None,
                    check: bool = True, tag: str = "ansatz", params: dict | None = None) -> FamilyDescriptor:
    """u = F(psi) xi + X2(G(psi)) X1 - X1(G(psi)) X2.

    ``calG`` is the profile with Delta G(psi) = calG(psi); when given the
    pressure closed form is attached.  ``check=False`` skips the xi(psi) = 0
    precondition (used to build deliberate counterexamples).
    """
    F, G = as_profile(F), as_profile(G)
    if check:
        worst = xi_derivative_max(frame, psi)
        if worst > XI_TOL:
            raise PreconditionViolated(f"xi(psi) reaches {worst:.3g} on the sample grid")

    def comps(fp):
        q = psi(*fp.X)
        g = G(q)
        return (F(q), fp.e(2, g), -fp.e(1, g))

    pressure = None
    if calG is not None:
        calG = as_profile(calG)
        integrand = (calG + 2.0 * F) * G.diff()

        def pressure(*X):
            fp = frame.at(X)
            q = psi(*X)
            grad = fp.grad(G(q))
            return -0.5 * J.dot(grad, grad) - integrand.antiderivative(q)

    p = {"F": str(F), "G": str(G)}
    p.update(params or {})
    return FamilyDescriptor(tag, p, frame.chart.name,
                            FrameField(frame, comps, f"{tag}({F}, {G})"), pressure=pressure,
                            extras={"psi": psi, "F": F, "G": G})


def nomizu_psi(a: float) -> Callable:
    """psi_a = (3 + cos 4s + 2a sin^2 2s cos 2(phi1 - phi2)) / 4."""
    a = float(a)

    def psi(s, p1, p2):
        return 0.25 * (3.0 + J.cos(4.0 * s) + (2.0 * a) * J.sin(2.0 * s) ** 2 * J.cos(2.0 * (p1 - p2)))
    return psi


def nomizu_cartesian(x1, y1, x2, y2):
    """(|x|^2 - |y|^2)^2 + 4 <x, y>^2 with x = (x1, x2), y = (y1, y2)."""
    return (x1 * x1 + x2 * x2 - y1 * y1 - y2 * y2) ** 2 + 4.0 * (x1 * y1 + x2 * y2) ** 2


BELTRAMI6_F = (-4.0, 6.0)  # F(x) = 2(3x - 2)


def nomizu_family(a: float, F) -> FamilyDescriptor:
    a = float(a)
    F = as_profile(F)
    psi = nomizu_psi(a)
    # Delta psi_a = 8(3 psi_a - 2)
    desc = sasakian_ansatz(s3_frame(), F, IDENTITY, psi, calG=Profile.polynomial([-16.0, 24.0]),
                           check=False, tag="nomizu", params={"a": a})

    def bernoulli(s, p1, p2):
        q = psi(s, p1, p2)
        f = F(q)
        return 0.5 * f * f - 12.0 * q * q + 16.0 * q - 2.0 * F.antiderivative(q)

    def loc(s, p1, p2):
        return (16.0 * a * (a * a - 1.0)) * J.sin(2.0 * s) * J.sin(4.0 * s) * J.sin(2.0 * (p1 - p2))

    mu = 6.0 if _same_poly(F, BELTRAMI6_F) else None
    return replace(desc, bernoulli=bernoulli, localizability=loc, mu=mu)


def two_killing(a1: float, a2: float) -> FamilyDescriptor:
    """u = sin 2s (a1 sin(phi1+phi2) X1 + a2 cos(phi1+phi2) X2)."""
    a1, a2 = float(a1), float(a2)
    if a1 == 0.0 and a2 == 0.0:
        raise BothParametersZero("two_killing needs a1^2 + a2^2 != 0")

    def comps(fp):
        s, p1, p2 = fp.X
        s2 = J.sin(2.0 * s)
        sig = p1 + p2
        return (0.0, J.scale(a1, s2 * J.sin(sig)), J.scale(a2, s2 * J.cos(sig)))

    def bernoulli(s, p1, p2):
        return 0.25 * (a1 * a2 * J.cos(4.0 * s)
                       + ((a1 * a1 + a2 * a2) - (a1 * a1 - a2 * a2) * J.cos(2.0 * (p1 + p2)))
                       * J.sin(2.0 * s) ** 2)

    def pressure(s, p1, p2):
        return (0.25 * a1 * a2) * J.cos(4.0 * s)

    def loc(s, p1, p2):
        return (a1 * a2 * (a1 + a2)) * J.sin(2.0 * s) * J.sin(4.0 * s) * J.sin(2.0 * (p1 + p2))

    return FamilyDescriptor("two-killing", {"a1": a1, "a2": a2}, "s3",
                            FrameField(s3_frame(), comps, f"two_killing({a1}, {a2})"),
                            bernoulli=bernoulli, pressure=pressure, localizability=loc,
                            mu=4.0 if a1 == a2 else None)


def two_killing_mirror_form(a1: float, a2: float) -> FrameField:
    """sin 2s (a1 sin(phi1-phi2) X1' + a2 cos(phi1-phi2) X2'), in Hopf-frame components."""
    a1, a2 = float(a1), float(a2)

    def comps(fp):
        s, p1, p2 = fp.X
        s2 = J.sin(2.0 * s)
        d = p1 - p2
        _, P1, P2 = primed_components(fp)
        c1, c2 = a1 * s2 * J.sin(d), a2 * s2 * J.cos(d)
        return tuple(J.add(c1 * P1[k], c2 * P2[k]) for k in range(3))
    return FrameField(s3_frame(), comps, f"two_killing_mirror({a1}, {a2})")


# -- twin and mirror forms --------------------------------------------------------

# basis vectors in Hopf-frame components: "xi", "X1", "X2" unprimed, "xi'" etc primed
def _basis(fp, name):
    if name.endswith("'"):
        return primed_components(fp)[("xi'", "X1'", "X2'").index(name)]
    e = [0.0, 0.0, 0.0]
    e[("xi", "X1", "X2").index(name)] = 1.0
    return tuple(e)


def _q_sin_plus(s, p1, p2):
    return J.sin(2.0 * s) * J.sin(p1 + p2)


def _q_sin_minus(s, p1, p2):
    return J.sin(2.0 * s) * J.sin(p1 - p2)


def _q_cos_plus(s, p1, p2):
    return J.sin(2.0 * s) * J.cos(p1 + p2)


def _q_cos_minus(s, p1, p2):
    return J.sin(2.0 * s) * J.cos(p1 - p2)


def _quad(f1, f2, sign):
    def q(s, p1, p2):
        c2, s2 = J.cos(s) ** 2, J.sin(s) ** 2
        return J.add(c2 * f1(2.0 * p1), J.scale(sign, s2 * f2(2.0 * p2)))
    return q


# tag -> (first integral q, vector multiplied by F(q), vector multiplied by G(q))
TWIN_FORMS = {
    "x1-xiprime": (_q_sin_plus, "X1", "xi'"),
    "x1prime-xi": (_q_sin_minus, "X1'", "xi"),
    "x2-xiprime": (_q_cos_plus, "X2", "xi'"),
    "x2prime-xi": (_q_cos_minus, "X2'", "xi"),
    "x1-x2prime": (_quad(J.sin, J.sin, -1.0), "X1", "X2'"),
    "x1prime-x2": (_quad(J.sin, J.sin, 1.0), "X1'", "X2"),
    "x1-x1prime": (_quad(J.cos, J.cos, 1.0), "X1", "X1'"),
    "x2-x2prime": (_quad(J.cos, J.cos, -1.0), "X2", "X2'"),
}
# forms with two real parameters: a cos 2s xi + b sin 2s trig(phi1+phi2) Xk
TWIN_LINEAR = {
    "cos-xi-x1": ("X1", J.sin),
    "cos-xi-x2": ("X2", J.cos),
}
TWIN_TAGS = tuple(TWIN_FORMS) + tuple(TWIN_LINEAR)


def twin_family(tag: str, F=IDENTITY, G=IDENTITY, a: float = 1.0, b: float = 1.0) -> FamilyDescriptor:
    """One of the ten twin/mirror forms (see TWIN_TAGS).

    The two ``cos-xi-*`` forms take the reals a, b; the others take profiles
    F, G composed with the form's first integral.
    """
    if tag in TWIN_LINEAR:
        vec, trig = TWIN_LINEAR[tag]
        a, b = float(a), float(b)
        k = ("X1", "X2").index(vec) + 1

        def comps(fp):
            s, p1, p2 = fp.X
            out = [J.scale(a, J.cos(2.0 * s)), 0.0, 0.0]
            out[k] = J.scale(b, J.sin(2.0 * s) * trig(p1 + p2))
            return tuple(out)
        return FamilyDescriptor(f"twin:{tag}", {"a": a, "b": b}, "s3",
                                FrameField(s3_frame(), comps, f"twin:{tag}({a}, {b})"))
    if tag not in TWIN_FORMS:
        raise UnknownTag(f"unknown twin form {tag!r}; expected one of {', '.join(TWIN_TAGS)}")
    F, G = as_profile(F), as_profile(G)
    q, vF, vG = TWIN_FORMS[tag]

    def comps(fp):
        val = q(*fp.X)
        f, g = F(val), G(val)
        eF, eG = _basis(fp, vF), _basis(fp, vG)
        return tuple(J.add(J.scale(f, eF[k]), J.scale(g, eG[k])) for k in range(3))
    return FamilyDescriptor(f"twin:{tag}", {"F": str(F), "G": str(G)}, "s3",
                            FrameField(s3_frame(), comps, f"twin:{tag}({F}, {G})"),
                            extras={"first_integral": q})


# -- mirrors ----------------------------------------------------------------------


def mirror(desc: FamilyDescriptor) -> FamilyDescriptor:
    """Image of an S^3 family under (x1, y1, x2, y2) -> (x1, y1, x2, -y2)."""
    from .isometries import mirror_map, pullback_scalar, pushforward_vector

    if desc.chart != "s3":
        raise ValueError("mirror images are defined for S^3 families only")
    iso = mirror_map()
    inv = iso.inverse()

    def image(f):
        return None if f is None else pullback_scalar(inv, f)

    loc = desc.localizability
    return FamilyDescriptor(
        f"mirror:{desc.tag}", dict(desc.params), "s3", pushforward_vector(iso, desc.field),
        bernoulli=image(desc.bernoulli), pressure=image(desc.pressure),
        localizability=image(loc), mu=None if desc.mu is None else -desc.mu,
        extras={"source": desc},
    )


# -- lookup by tag --------------------------------------------------------------------


def build(tag: str, **kw) -> FamilyDescriptor:
    """Construct a family from a CLI-style tag and keyword parameters."""
    if tag.startswith("mirror:"):
        return mirror(build(tag[len("mirror:"):], **kw))
    if tag.startswith("twin:"):
        return twin_family(tag[len("twin:"):], **{k: v for k, v in kw.items() if k in ("F", "G", "a", "b")})
    if tag == "kkps":
        return kkps(kw.get("A", "1"), kw.get("B", "0"))
    if tag == "hyperbolic":
        return hyperbolic(kw.get("A", "1"), kw.get("B", "0"))
    if tag == "nomizu":
        return nomizu_family(kw.get("a", 1.0), kw.get("F", "0"))
    if tag == "two-killing":
        return two_killing(kw.get("a1", 1.0), kw.get("a2", 1.0))
    if tag == "ansatz":
        return ansatz_example(kw.get("chart", "s3"), kw.get("F", "x"), kw.get("G", "x"), kw.get("psi"))
    raise UnknownTag(f"unknown family {tag!r}")


def _psi_nil(x, y, z):
    return J.cos((2.0 * math.pi) * (x - y))


def _psi_sl2(x, y, t):
    return x / y


def _psi_s3(s, p1, p2):
    return J.cos(s) ** 2


ANSATZ_PSI = {"s3": _psi_s3, "nil": _psi_nil, "sl2": _psi_sl2}


def ansatz_example(chart: str, F, G, psi: Callable | None = None) -> FamilyDescriptor:
    """The Sasakian ansatz with the standard xi-invariant potential of each chart."""
    from .frames import frame_for_chart

    name = get_chart(chart).name
    return sasakian_ansatz(frame_for_chart(name), F, G, psi or ANSATZ_PSI[name],
                           params={"chart": name})
