import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sasakian_euler import jets as J
from sasakian_euler.errors import OrderUnsupported, SingularEvaluation

finite = st.floats(-2.0, 2.0, allow_nan=False)
positive = st.floats(0.1, 3.0)


def test_variable_and_partials():
    x, y, z = J.lift((0.3, -0.2, 1.1), 3)
    f = x * x * y + z ** 3
    assert f.partial((0, 0, 0)) == pytest.approx(0.3**2 * -0.2 + 1.1**3)
    assert f.partial((1, 0, 0)) == pytest.approx(2 * 0.3 * -0.2)
    assert f.partial((2, 1, 0)) == pytest.approx(2.0)
    assert f.partial((0, 0, 3)) == pytest.approx(6.0)
    assert f.partial((1, 1, 1)) == pytest.approx(0.0)


def test_partial_beyond_order_raises():
    x, _, _ = J.lift((0.1, 0.2, 0.3), 1)
    with pytest.raises(OrderUnsupported):
        (x * x).partial((2, 0, 0))
    with pytest.raises(OrderUnsupported):
        J.Jet.constant(1.0, 0).diff(0)


@given(finite, finite, finite)
def test_product_rule(a, b, c):
    x, y, z = J.lift((a, b, c), 2)
    f, g = J.sin(x * y), J.exp(z - x)
    lhs = (f * g).partial((1, 0, 0))
    rhs = f.partial((1, 0, 0)) * g.value + f.value * g.partial((1, 0, 0))
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(finite)
def test_pythagoras(a):
    x, _, _ = J.lift((a, 0.0, 0.0), 5)
    one = J.sin(x) ** 2 + J.cos(x) ** 2
    assert np.allclose(one.c[0], 1.0) and np.allclose(one.c[1:], 0.0, atol=1e-13)


@given(positive)
def test_exp_log_inverse(a):
    x, _, _ = J.lift((a, 0.0, 0.0), 4)
    back = J.exp(J.log(x))
    assert np.allclose(back.c, x.c, atol=1e-12)


@given(st.floats(-3, 3), st.floats(0.2, 3))
def test_atan2_derivatives(yv, xv):
    x, y, _ = J.lift((xv, yv, 0.0), 1)
    t = J.atan2(y, x)
    r2 = xv * xv + yv * yv
    assert t.value == pytest.approx(math.atan2(yv, xv))
    assert t.partial((1, 0, 0)) == pytest.approx(-yv / r2)
    assert t.partial((0, 1, 0)) == pytest.approx(xv / r2)


@given(positive, st.floats(-2.5, 2.5))
def test_power_matches_finite_differences(a, p):
    f = lambda v: v ** p
    x, _, _ = J.lift((a, 0.0, 0.0), 2)
    jet = J.power(x, p)
    h = 1e-5
    assert jet.partial((1, 0, 0)) == pytest.approx((f(a + h) - f(a - h)) / (2 * h), rel=1e-6, abs=1e-8)


def test_reciprocal_and_tan_singularities():
    x, _, _ = J.lift((0.0, 0.0, 0.0), 1)
    with pytest.raises(SingularEvaluation):
        J.reciprocal(x)
    y, _, _ = J.lift((math.pi / 2, 0.0, 0.0), 1)
    with pytest.raises(SingularEvaluation):
        J.tan(y)


def test_elementary_dispatch_on_floats_and_arrays():
    assert J.sin(0.5) == pytest.approx(math.sin(0.5))
    arr = np.array([0.1, 0.2])
    assert np.allclose(J.cos(arr), np.cos(arr))
    assert J.elementary("atan2", 1.0, 1.0) == pytest.approx(math.pi / 4)


def test_batched_jets():
    pts = np.array([[0.1, 0.2, 0.3], [1.0, 1.0, 1.0], [0.0, 0.5, 1.0]])
    x, y, z = J.lift(pts, 1)
    f = x * J.sin(z) + y
    assert f.batch_shape == (3,)
    assert np.allclose(f.partial((0, 0, 1)), pts[0] * np.cos(pts[2]))


def test_required_order_and_evaluate():
    fn = lambda X: J.diff(J.diff(X[0] ** 3, 0), 0)
    assert J.required_order(fn, (0.5, 0.0, 0.0)) == 2
    vals = J.evaluate(fn, np.array([[0.5, 1.0], [0.0, 0.0], [0.0, 0.0]]))
    assert np.allclose(vals, [3.0, 6.0])
    assert J.required_order(lambda X: X[0] * 2.0, (0.1, 0.2, 0.3)) == 0


def test_substitute_gives_chain_rule():
    # f(h) = h0^2 h1 with h = (y0 + y1, y0 y1, 0)
    y = J.lift((0.4, 0.7, 0.0), 2)
    inner = (y[0] + y[1], y[0] * y[1], J.Jet.constant(0.0, 2))
    out = J.compose_through(lambda h0, h1, h2: J.diff(h0 ** 3, 0) / 3.0 * h1, inner)
    direct = (y[0] + y[1]) ** 2 * (y[0] * y[1])
    assert np.allclose(out.c, direct.c, atol=1e-13)


def test_nested_compose_through_at_order_zero():
    inner = J.lift((0.3, 0.4, 0.5), 0)
    out = J.compose_through(lambda a, b, c: a * b + c, inner)
    assert J.value(out) == pytest.approx(0.62)
    twice = J.compose_through(lambda *h: J.compose_through(lambda a, b, c: a * b + c, h), inner)
    assert J.value(twice) == pytest.approx(0.62)
