import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sasakian_euler import families as Fam
from sasakian_euler import isometries as I
from sasakian_euler import jets as J
from sasakian_euler.errors import AxisPoint
from sasakian_euler.frames import FrameField, primed_components, s3_frame
from sasakian_euler.grids import SampleGrid

SMALL = SampleGrid(counts=(6, 6, 6))
s_val = st.floats(0.05, math.pi / 2 - 0.05)
angle = st.floats(0.0, 2 * math.pi, exclude_max=True)


@given(s_val, angle, angle)
def test_hopf_roundtrip(s, p1, p2):
    back = I.cartesian_to_hopf(*I.hopf_to_cartesian(s, p1, p2))
    assert back[0] == pytest.approx(s, abs=1e-12)
    for a, b in zip(back[1:], (p1, p2)):
        assert math.cos(a - b) == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= a < 2 * math.pi


def test_axis_points_raise():
    with pytest.raises(AxisPoint):
        I.cartesian_to_hopf(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(AxisPoint):
        I.cartesian_to_hopf(0.0, 0.0, 0.0, 1.0)


def test_orthogonality_is_enforced():
    with pytest.raises(ValueError):
        I.AmbientIsometry(np.diag([1.0, 1.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        I.isometry_from_tag("1 2 3")
    lit = I.isometry_from_tag(" ".join(str(v) for v in np.eye(4).ravel()))
    assert lit.det == 1


@pytest.mark.parametrize("name,det", [("psi", 1), ("mirror", -1), ("sec43", 1), ("identity", 1)])
def test_named_maps(name, det):
    iso = I.isometry_from_tag(name)
    assert iso.det == det
    x = np.array([0.5, -0.5, 0.5, 0.5])
    assert np.allclose(iso.inverse()(iso(x)), x)


def test_psi_preserves_the_killing_frame():
    iso = I.psi_map()
    rng = np.random.default_rng(3)
    x = rng.normal(size=(4, 50))
    x /= np.linalg.norm(x, axis=0)
    M = iso.matrix
    for k in range(3):
        lhs = M @ np.array(I.ambient_frame(*x)[k])
        rhs = np.array(I.ambient_frame(*(M @ x))[k])
        assert np.allclose(lhs, rhs, atol=1e-14)


def test_psi_pulls_nomizu_back_to_zonal():
    f = I.pullback_scalar(I.psi_map(), Fam.nomizu_psi(1.0))
    pts = SMALL.points()
    assert np.allclose(f(*pts), np.sin(2 * pts[0]) ** 2, atol=1e-13)


def test_pullback_keeps_derivatives():
    # d/ds of the pulled-back function through jets vs finite differences
    f = I.pullback_scalar(I.sec43_map(), Fam.nomizu_psi(0.5))
    p = np.array([0.7, 1.1, 2.3])
    d = J.evaluate(lambda X: J.diff(f(*X), 0), p, order=1)
    h = 1e-6
    fd = (f(p[0] + h, p[1], p[2]) - f(p[0] - h, p[1], p[2])) / (2 * h)
    assert d == pytest.approx(fd, abs=1e-7)


def test_mirror_of_hopf_frame_is_primed_frame():
    frame = s3_frame()
    for k in range(3):
        e = FrameField(frame, lambda fp, k=k: tuple(1.0 if i == k else 0.0 for i in range(3)))
        target = FrameField(frame, lambda fp, k=k: primed_components(fp)[k])
        rep = I.check_equivalence(I.mirror_map(), e, target, SMALL, tol=1e-10)
        assert rep.passed, rep.line()


def test_identity_equivalence_and_nontrivial_failure():
    u = Fam.two_killing(1.0, 2.0).field
    assert I.check_equivalence(I.identity_map(), u, u, SMALL).max_residual < 1e-13
    rep = I.check_equivalence(I.mirror_map(), u, u, SMALL)
    assert not rep.passed


def test_mirror_of_two_killing_is_mirror_form():
    u = Fam.two_killing(1.0, 2.0).field
    assert I.check_equivalence(I.mirror_map(), u, Fam.two_killing_mirror_form(1.0, 2.0), SMALL).passed


def test_ambient_field_roundtrip():
    u = Fam.kkps("x", "1-x").field
    back = I.ambient_from_frame(u).to_frame_field()
    assert I.check_equivalence(I.identity_map(), back, u, SMALL).max_residual < 1e-12
