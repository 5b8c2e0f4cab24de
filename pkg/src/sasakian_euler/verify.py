"""Residual checks for steady Euler fields and the C^k distance estimator.

Every check takes a field (FrameField or ChartVectorField, or a
FamilyDescriptor) and a :class:`SampleGrid` and returns a
:class:`ResidualReport` whose max is a grid supremum after one local
refinement pass.
"""

from __future__ import annotations

import itertools
import json
import math
from typing import Callable

import numpy as np

from . import jets as J
from .charts import ChartPoint, ChartVectorField, get_chart
from .errors import OrderUnsupported
from .families import FamilyDescriptor
from .frames import FrameField, FramePoint
from .grids import ResidualReport, SampleGrid, report, sup

RESIDUAL_TOL = 1e-8
CROSS_TOL = 1e-7
DERIVED_TOL = 1e-6
ISO_BINWIDTH = 1e-3


def default_grid(chart: str = "s3") -> SampleGrid:
    return SampleGrid(chart=get_chart(chart).name)


def _unwrap(field):
    return field.field if isinstance(field, FamilyDescriptor) else field


def _context(field):
    """(point factory, component getter) for either field representation."""
    field = _unwrap(field)
    if isinstance(field, FrameField):
        frame = field.frame
        return (lambda X: frame.at(X)), (lambda ctx: field(ctx))
    if isinstance(field, ChartVectorField):
        chart = field.chart
        return (lambda X: ChartPoint(chart, X)), (lambda ctx: tuple(field(*ctx.X)))
    raise TypeError(f"not a vector field: {field!r}")


def _grid_for(field, grid):
    if grid is not None:
        return grid
    f = _unwrap(field)
    chart = f.frame.chart.name if isinstance(f, FrameField) else f.chart.name
    return default_grid(chart)


def _sub(a, b):
    return tuple(J.add(x, -y if not J.is_zero(y) else 0.0) for x, y in zip(a, b))


def _lin(*terms):
    """sum of coefficient * vector."""
    return tuple(J.add(*(J.scale(c, v[i]) for c, v in terms)) for i in range(3))


# -- individual checks -----------------------------------------------------------


def check_divergence(field, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                     threads: int = 1) -> ResidualReport:
    make, comps = _context(field)
    grid = _grid_for(field, grid)
    return report("divergence", lambda X: (lambda c: c.div(comps(c)))(make(X)), grid, tol, threads)


def check_steady_euler(field, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                       pressure: Callable | None = None, bernoulli: Callable | None = None,
                       threads: int = 1) -> ResidualReport:
    """curl(nabla_u u) (pressure-free), plus nabla_u u + grad p and
    u x curl u - grad b when closed forms are supplied or attached."""
    if isinstance(field, FamilyDescriptor):
        pressure = pressure or field.pressure
        bernoulli = bernoulli or field.bernoulli
    make, comps = _context(field)
    grid = _grid_for(field, grid)

    def exact(X):
        c = make(X)
        u = comps(c)
        w = c.curl(c.covd(u, u))
        return c.norm2(w)

    parts = [report("steady_euler", exact, grid, tol, threads, post="sqrt")]
    if pressure is not None:
        def pres(X):
            c = make(X)
            u = comps(c)
            r = _lin((1.0, c.covd(u, u)), (1.0, c.grad(pressure(*X))))
            return c.norm2(r)
        parts.append(report("pressure", pres, grid, tol, threads, post="sqrt"))
    if bernoulli is not None:
        def bern(X):
            c = make(X)
            u = comps(c)
            r = _sub(c.cross(u, c.curl(u)), c.grad(bernoulli(*X)))
            return c.norm2(r)
        parts.append(report("bernoulli", bern, grid, tol, threads, post="sqrt"))
    if len(parts) == 1:
        return parts[0]
    return ResidualReport.combine("steady_euler", parts, tol)


def check_beltrami(field, mu: float, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                   threads: int = 1) -> ResidualReport:
    make, comps = _context(field)
    grid = _grid_for(field, grid)

    def fn(X):
        c = make(X)
        u = comps(c)
        return c.norm2(_lin((1.0, c.curl(u)), (-float(mu), u)))
    return report(f"beltrami[mu={mu:g}]", fn, grid, tol, threads, post="sqrt")


def beltrami_scan(field, grid: SampleGrid | None = None, mu_range=(-10.0, 10.0)) -> tuple[float, float]:
    """Least sup-residual of curl u - mu u over constant mu in ``mu_range``.

    The sup over the grid of |curl u - mu u| is convex in mu, so a bounded
    scalar minimization is exact up to its tolerance.
    """
    from scipy.optimize import minimize_scalar

    make, comps = _context(field)
    grid = _grid_for(field, grid)
    pts = grid.points()

    def pieces(X):
        c = make(X)
        u = comps(c)
        w = c.curl(u)
        return (c.inner(w, w), c.inner(w, u), c.inner(u, u))

    ww, wu, uu = (np.broadcast_to(np.asarray(v, dtype=float), pts.shape[1:]) for v in J.evaluate(pieces, pts))

    def worst(mu):
        return float(np.sqrt(np.max(np.maximum(ww - 2 * mu * wu + mu * mu * uu, 0.0))))

    res = minimize_scalar(worst, bounds=mu_range, method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(res.fun)


def check_localizable(field, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                      closed_form: Callable | None = None, threads: int = 1) -> ResidualReport:
    """max |u(|u|^2)|; with ``closed_form`` also max |u(|u|^2) - closed_form|."""
    make, comps = _context(field)
    grid = _grid_for(field, grid)

    def density(X):
        c = make(X)
        u = comps(c)
        return c.d(u, c.norm2(u))

    main = report("localizable", density, grid, tol, threads)
    if closed_form is None:
        return main
    match = report("localizable_closed_form", lambda X: J.add(density(X), -closed_form(*X)),
                   grid, tol, threads)
    out = ResidualReport.combine("localizable", [main, match], tol)
    # headline numbers are those of u(|u|^2) itself; the match is reported as a part
    out.max_residual, out.argmax, out.mean_residual = main.max_residual, main.argmax, main.mean_residual
    return out


def check_bernoulli_conserved(field, b: Callable, grid: SampleGrid | None = None,
                              tol: float = RESIDUAL_TOL, threads: int = 1) -> ResidualReport:
    make, comps = _context(field)
    grid = _grid_for(field, grid)
    return report("bernoulli_conserved", lambda X: (lambda c: c.d(comps(c), b(*X)))(make(X)),
                  grid, tol, threads)


def check_commutator(field, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                     threads: int = 1) -> ResidualReport:
    """[u, curl u] = 0."""
    make, comps = _context(field)
    grid = _grid_for(field, grid)

    def fn(X):
        c = make(X)
        u = comps(c)
        return c.norm2(c.bracket(u, c.curl(u)))
    return report("commutator", fn, grid, tol, threads, post="sqrt")


def check_xi_symmetry(field, grid: SampleGrid | None = None, tol: float = RESIDUAL_TOL,
                      threads: int = 1) -> ResidualReport:
    """xi(f) = 0, xi(f1) = -(C0+1) f2, xi(f2) = (C0+1) f1, plus closedness of
    phi u: div u = xi(f) and curl(phi u) has no transverse part."""
    field = _unwrap(field)
    if not isinstance(field, FrameField):
        raise TypeError("xi-symmetry needs a frame field")
    frame = field.frame
    grid = _grid_for(field, grid)

    def conditions(X):
        fp = frame.at(X)
        f, f1, f2 = field(fp)
        k = fp.C[0] + 1.0
        r = (fp.e(0, f), J.add(fp.e(0, f1), J.scale(k, f2)), J.add(fp.e(0, f2), -J.scale(k, f1)))
        return J.dot(r, r)

    def closed(X):
        fp = frame.at(X)
        u = field(fp)
        w = fp.curl(FramePoint.phi(u))
        r = (J.add(fp.div(u), -fp.e(0, u[0])), w[1], w[2])
        return J.dot(r, r)

    parts = [report("xi_symmetry", conditions, grid, tol, threads, post="sqrt"),
             report("phi_u_closed", closed, grid, tol, threads, post="sqrt")]
    return ResidualReport.combine("xi_symmetry", parts, tol)


def check_isoparametric(psi: Callable, grid: SampleGrid | None = None, tol: float = 1e-6,
                        binwidth: float = ISO_BINWIDTH, lipschitz: float = 10.0) -> ResidualReport:
    """Bin sample points by psi and measure, per bin, the spread of
    |grad psi|^2 and Delta psi.

    Before measuring, each bin is detrended with the slope read off the
    neighbouring bins' means, so a steep but genuine dependence on psi only
    leaves O(binwidth^2) curvature while scatter at equal psi survives.  The
    allowance is ``tol + lipschitz * binwidth``.  The default grid mixes the
    tensor grid with seeded random points: on a pure tensor grid each bin
    tends to hold copies of one or two geometric points.
    """
    grid = grid or SampleGrid(random_count=20000, seed=0)
    chart = grid.spec
    pts = grid.points()

    def pieces(X):
        cp = ChartPoint(chart, X)
        q = psi(*X)
        g = cp.grad(q)
        return (q, cp.inner(g, g), cp.laplacian(q))

    q, g2, lap = (np.broadcast_to(np.asarray(v, dtype=float), pts.shape[1:]).ravel()
                  for v in J.evaluate(pieces, pts))
    allowance = tol + lipschitz * binwidth
    parts = []
    for name, vals in (("grad_norm2", g2), ("laplacian", lap)):
        spread, where = _binned_spread(q, vals, binwidth)
        arg = tuple(float(v) for v in pts[:, where]) if where is not None else (math.nan,) * 3
        parts.append(ResidualReport(f"isoparametric[{name}]", spread, spread, arg, allowance,
                                    spread <= allowance))
    return ResidualReport.combine("isoparametric", parts, allowance)


def _binned_spread(q, vals, binwidth):
    bins = np.floor(q / binwidth).astype(np.int64)
    order = np.argsort(bins, kind="stable")
    b, qs, vs = bins[order], q[order], vals[order]
    cuts = np.flatnonzero(np.diff(b)) + 1
    starts, ends = np.r_[0, cuts], np.r_[cuts, len(b)]
    qm = np.array([qs[lo:hi].mean() for lo, hi in zip(starts, ends)])
    vm = np.array([vs[lo:hi].mean() for lo, hi in zip(starts, ends)])
    worst, where = 0.0, None
    for i, (lo, hi) in enumerate(zip(starts, ends)):
        if hi - lo < 2:
            continue
        nb = [k for k in (i - 1, i + 1) if 0 <= k < len(qm)]
        lo_k, hi_k = min(nb + [i]), max(nb + [i])
        slope = (vm[hi_k] - vm[lo_k]) / (qm[hi_k] - qm[lo_k]) if qm[hi_k] > qm[lo_k] else 0.0
        resid = vs[lo:hi] - slope * (qs[lo:hi] - qm[i])
        spread = float(np.ptp(resid))
        if spread > worst:
            worst, where = spread, int(order[lo + int(np.argmax(np.abs(resid - resid.mean())))])
    return worst, where


# -- C^k distance ------------------------------------------------------------------


def _nabla(fp: FramePoint, T: dict, rank: int) -> dict:
    """One more frame covariant derivative of the tensor T (indexed by tuples)."""
    out = {}
    for a in range(3):
        conn = [fp.connection(a, b) for b in range(3)]
        for idx in itertools.product(range(3), repeat=rank):
            val = fp.e(a, T[idx])
            for slot in range(rank):
                for j in range(3):
                    g = conn[idx[slot]][j]  # <nabla_{e_a} e_slot, e_j>
                    if J.is_zero(g):
                        continue
                    swapped = idx[:slot] + (j,) + idx[slot + 1:]
                    val = J.add(val, -J.scale(g, T[swapped]))
            out[(a,) + idx] = val
    return out


def ck_distance(u, v, k: int, grid: SampleGrid | None = None, threads: int = 1,
                refine: bool = True) -> float:
    """sup|u - v| + sum_{i=1..k} sup|nabla^i (u - v)| over the grid."""
    u, v = _unwrap(u), _unwrap(v)
    if not (isinstance(u, FrameField) and isinstance(v, FrameField)):
        raise TypeError("ck_distance compares frame fields")
    if k < 0 or k > J.PROBE_ORDER - 2:
        raise OrderUnsupported(f"k={k} exceeds the supported derivative depth {J.PROBE_ORDER - 2}")
    frame = u.frame
    grid = grid or default_grid(frame.chart.name)

    def tensor(X, i):
        fp = frame.at(X)
        a, b = u(fp), v(fp)
        T = {(c,): J.add(a[c], -b[c] if not J.is_zero(b[c]) else 0.0) for c in range(3)}
        for r in range(1, i + 1):
            T = _nabla(fp, T, r)
        return J.add(*(J.scale(t, t) for t in T.values()))

    total = 0.0
    for i in range(k + 1):
        mx, _, _ = sup(lambda X, i=i: tensor(X, i), grid, threads, refine, post="sqrt")
        total += mx
    return total


# -- the two realizations of the calculus --------------------------------------------


def cross_check_frame_vs_chart(field, grid: SampleGrid | None = None, tol: float = CROSS_TOL,
                               threads: int = 1) -> ResidualReport:
    """Frame formulas against Christoffel-symbol computations of div, curl and
    nabla_u u (chart results converted back to frame components)."""
    field = _unwrap(field)
    if not isinstance(field, FrameField):
        raise TypeError("cross-check needs a frame field")
    frame = field.frame
    grid = _grid_for(field, grid)

    def fns(X):
        fp = frame.at(X)
        cp = fp.cp
        u = field(fp)
        uc = fp.to_chart(u)
        d_div = J.add(fp.div(u), -cp.div(uc))
        d_curl = _sub(fp.curl(u), fp.from_chart(cp.curl(uc)))
        d_cov = _sub(fp.covd(u, u), fp.from_chart(cp.covd(uc, uc)))
        return d_div, J.dot(d_curl, d_curl), J.dot(d_cov, d_cov)

    parts = [
        report("cross_div", lambda X: fns(X)[0], grid, tol, threads),
        report("cross_curl", lambda X: fns(X)[1], grid, tol, threads, post="sqrt"),
        report("cross_covd", lambda X: fns(X)[2], grid, tol, threads, post="sqrt"),
    ]
    return ResidualReport.combine("frame_vs_chart", parts, tol)


# -- descriptor-level driver -----------------------------------------------------------

CHECKS = ("divergence", "steady-euler", "beltrami", "localizable", "bernoulli", "commutator",
          "xi-symmetry", "cross-check")


def run_checks(desc: FamilyDescriptor, checks=("all",), grid: SampleGrid | None = None,
               tol: float | None = None, mu: float | None = None, threads: int = 1) -> list[ResidualReport]:
    """Run the requested checks (``all`` = every check the descriptor supports)."""
    grid = _grid_for(desc, grid)
    if tol is None:
        tol = RESIDUAL_TOL if grid.spec.name in ("s3", "h3") else DERIVED_TOL
    want = set(CHECKS) if "all" in checks else set(checks)
    unknown = want - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}")
    is_frame = isinstance(desc.field, FrameField)
    mu = mu if mu is not None else desc.mu
    out = []
    if "divergence" in want:
        out.append(check_divergence(desc, grid, tol, threads))
    if "steady-euler" in want:
        out.append(check_steady_euler(desc, grid, tol, threads=threads))
    if "beltrami" in want and (mu is not None or "all" not in checks):
        if mu is None:
            raise ValueError("beltrami check needs --mu or a family with a known eigenvalue")
        out.append(check_beltrami(desc, mu, grid, tol, threads))
    if "localizable" in want and (desc.localizability is not None or "all" not in checks):
        out.append(check_localizable(desc, grid, tol, desc.localizability, threads))
    if "bernoulli" in want and desc.bernoulli is not None:
        out.append(check_bernoulli_conserved(desc, desc.bernoulli, grid, tol, threads))
    if "commutator" in want:
        out.append(check_commutator(desc, grid, tol, threads))
    if "xi-symmetry" in want and is_frame and (desc.tag in ("ansatz", "nomizu") or "all" not in checks):
        out.append(check_xi_symmetry(desc, grid, tol, threads))
    if "cross-check" in want and is_frame:
        out.append(cross_check_frame_vs_chart(desc, grid, max(tol, CROSS_TOL), threads))
    return out


def reports_to_json(reports: list[ResidualReport], meta: dict | None = None) -> str:
    doc = {"checks": [r.to_dict() for r in reports], "pass": all(r.passed for r in reports)}
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=2, sort_keys=False)
