import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fd_derivative
from sasakian_euler import jets as J
from sasakian_euler.profiles import Profile, ProfileSyntaxError, X, as_profile, parse


def trees(depth=3):
    leaf = st.one_of(st.just(X), st.integers(-3, 3).map(lambda n: Profile.const(n)))
    return st.recursive(
        leaf,
        lambda kids: st.one_of(
            st.tuples(kids, kids).map(lambda t: t[0] + t[1]),
            st.tuples(kids, kids).map(lambda t: t[0] - t[1]),
            st.tuples(kids, kids).map(lambda t: t[0] * t[1]),
            st.tuples(kids, st.integers(0, 3)).map(lambda t: t[0] ** t[1]),
            kids.map(lambda k: Profile("sin", (k,))),
            kids.map(lambda k: Profile("cos", (k,))),
            kids.map(lambda k: -k),
        ),
        max_leaves=6,
    )


@pytest.mark.parametrize("text,x,expected", [
    ("2*(3*x-2)", 0.5, -1.0),
    ("x^2-3*x+1", 2.0, -1.0),
    ("-x^2", 3.0, -9.0),
    ("sin(x)*exp(-x)", 1.0, math.sin(1.0) * math.exp(-1.0)),
    ("1/(1+x^2)", 1.0, 0.5),
    ("2^3^2", 0.0, 64.0),
    ("x^-2", 2.0, 0.25),
])
def test_parse_values(text, x, expected):
    assert parse(text)(x) == pytest.approx(expected)


@pytest.mark.parametrize("bad", ["", "x+", "2*(x", "y", "x^1.5", "sin x", "x)"])
def test_parse_errors(bad):
    with pytest.raises(ProfileSyntaxError):
        parse(bad)


@given(trees(), st.floats(-1.5, 1.5))
def test_print_parse_roundtrip(tree, x):
    again = parse(str(tree))
    assert again(x) == pytest.approx(tree(x), rel=1e-12, abs=1e-12)


@given(trees(), st.floats(-1.0, 1.0))
def test_jet_derivative_matches_finite_differences(tree, x):
    assert tree.derivative(x, 1) == pytest.approx(fd_derivative(tree, x, 1), abs=1e-7, rel=1e-7)


@given(trees(), st.floats(-1.0, 1.0))
def test_symbolic_derivative_matches_jet(tree, x):
    assert tree.diff()(x) == pytest.approx(tree.derivative(x, 1), abs=1e-10, rel=1e-10)


def test_second_derivative():
    p = parse("sin(2*x)")
    assert p.derivative(0.3, 2) == pytest.approx(-4 * math.sin(0.6))


def test_polynomial_detection_and_exact_antiderivative():
    p = parse("2*(3*x-2)")
    assert np.allclose(p.poly.coef, [-4.0, 6.0])
    # int_0^x 6q - 4 = 3x^2 - 4x
    assert p.antiderivative(0.7) == 3 * 0.7**2 - 4 * 0.7
    assert parse("sin(x)").poly is None
    assert parse("x/2").poly is not None


def test_quadrature_antiderivative():
    p = parse("exp(x)*cos(x)")
    exact = lambda x: 0.5 * (math.exp(x) * (math.sin(x) + math.cos(x)) - 1.0)
    assert p.antiderivative(1.3) == pytest.approx(exact(1.3), abs=1e-12)


@pytest.mark.parametrize("text", ["x^3-x", "cos(x)"])
def test_antiderivative_jet(text):
    p = parse(text)
    x = J.Jet.variable(np.array([0.2, 0.9]), 0, 3)
    Phi = p.antiderivative(x)
    assert np.allclose(Phi.partial((1, 0, 0)), p(np.array([0.2, 0.9])))
    assert np.allclose(Phi.partial((2, 0, 0)), p.derivative(np.array([0.2, 0.9]), 1))


def test_as_profile():
    assert as_profile(2)(5.0) == 2.0
    assert as_profile("x")(3.0) == 3.0
    with pytest.raises(TypeError):
        as_profile(object())


def test_compose():
    p = parse("sin(x)+x^2").compose(parse("2*x-1"))
    assert p(0.7) == pytest.approx(math.sin(0.4) + 0.16)
    assert parse(str(p))(0.7) == pytest.approx(p(0.7))
