"""One-variable profile functions as small expression trees.

Profiles are the free functions (A, B, F, G, ...) in the solution families.
Keeping them as trees rather than opaque callables lets the jet engine
differentiate them and makes polynomial antiderivatives exact.

Grammar accepted by :func:`parse` (variable ``x``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' integer)*
    base   := number | 'x' | func '(' expr ')' | '(' expr ')' | '-' factor
    func   := 'sin' | 'cos' | 'exp'
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from . import jets as J

_FUNCS = {"sin": J.sin, "cos": J.cos, "exp": J.exp}
_NP_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
QUAD_TOL = 1e-12


class ProfileSyntaxError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Profile:
    op: str  # const | var | add | sub | mul | div | pow | neg | sin | cos | exp
    args: tuple = ()
    value: float = 0.0

    # -- construction -------------------------------------------------------

    @staticmethod
    def const(c: float) -> "Profile":
        return Profile("const", (), float(c))

    @staticmethod
    def var() -> "Profile":
        return Profile("var")

    @staticmethod
    def polynomial(coeffs) -> "Profile":
        """sum coeffs[k] x^k (lowest degree first)."""
        terms = [c * X**k if k else Profile.const(c) for k, c in enumerate(coeffs) if c != 0.0]
        if not terms:
            return Profile.const(0.0)
        out = terms[0]
        for t in terms[1:]:
            out = out + t
        return out

    def _wrap(self, other):
        return other if isinstance(other, Profile) else Profile.const(other)

    def __add__(self, other):
        return Profile("add", (self, self._wrap(other)))

    def __radd__(self, other):
        return Profile("add", (self._wrap(other), self))

    def __sub__(self, other):
        return Profile("sub", (self, self._wrap(other)))

    def __rsub__(self, other):
        return Profile("sub", (self._wrap(other), self))

    def __mul__(self, other):
        return Profile("mul", (self, self._wrap(other)))

    def __rmul__(self, other):
        return Profile("mul", (self._wrap(other), self))

    def __truediv__(self, other):
        return Profile("div", (self, self._wrap(other)))

    def __rtruediv__(self, other):
        return Profile("div", (self._wrap(other), self))

    def __neg__(self):
        return Profile("neg", (self,))

    def __pow__(self, n: int):
        if int(n) != n:
            raise ValueError("profiles only support integer powers")
        return Profile("pow", (self,), float(int(n)))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        op = self.op
        if op == "const":
            return self.value
        if op == "var":
            return x
        if op == "neg":
            return -self.args[0](x)
        if op == "pow":
            return self.args[0](x) ** int(self.value)
        if op in _FUNCS:
            return _FUNCS[op](self.args[0](x))
        a, b = self.args[0](x), self.args[1](x)
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if op == "div":
            return a / b
        raise ValueError(f"unknown profile node {op!r}")

    def compose(self, inner: "Profile") -> "Profile":
        """The profile x -> self(inner(x))."""
        if self.op == "var":
            return inner
        if self.op == "const":
            return self
        return Profile(self.op, tuple(a.compose(inner) for a in self.args), self.value)

    def derivative(self, x0, n: int = 1):
        """n-th derivative at x0 (float or array) via a one-variable jet."""
        jet = J.Jet.variable(x0, 0, n)
        out = self(jet)
        if not isinstance(out, J.Jet):
            return np.zeros_like(np.asarray(x0, dtype=float)) if n else out
        return out.partial((n, 0, 0))

    def diff(self) -> "Profile":
        """Symbolic derivative."""
        op, a = self.op, self.args
        if op == "const":
            return Profile.const(0.0)
        if op == "var":
            return Profile.const(1.0)
        if op == "neg":
            return _simplify(-a[0].diff())
        if op == "add":
            return _simplify(a[0].diff() + a[1].diff())
        if op == "sub":
            return _simplify(a[0].diff() - a[1].diff())
        if op == "mul":
            return _simplify(a[0].diff() * a[1] + a[0] * a[1].diff())
        if op == "div":
            return _simplify((a[0].diff() * a[1] - a[0] * a[1].diff()) / a[1] ** 2)
        if op == "pow":
            n = int(self.value)
            if n == 0:
                return Profile.const(0.0)
            return _simplify(Profile.const(n) * a[0] ** (n - 1) * a[0].diff())
        if op == "sin":
            return _simplify(Profile("cos", a) * a[0].diff())
        if op == "cos":
            return _simplify(-Profile("sin", a) * a[0].diff())
        if op == "exp":
            return _simplify(self * a[0].diff())
        raise ValueError(op)

    # -- polynomials and antiderivatives ----------------------------------------

    @cached_property
    def poly(self) -> Polynomial | None:
        """The profile as a numpy Polynomial, or None if it is not one."""
        op = self.op
        if op == "const":
            return Polynomial([self.value])
        if op == "var":
            return Polynomial([0.0, 1.0])
        if op in _FUNCS:
            return None
        ps = [t.poly for t in self.args]
        if any(p is None for p in ps):
            return None
        if op == "neg":
            return -ps[0]
        if op == "pow":
            n = int(self.value)
            return ps[0] ** n if n >= 0 else None
        if op == "add":
            return ps[0] + ps[1]
        if op == "sub":
            return ps[0] - ps[1]
        if op == "mul":
            return ps[0] * ps[1]
        if op == "div":
            den = ps[1].trim()
            if den.degree() == 0 and den.coef[0] != 0.0:
                return ps[0] / den.coef[0]
            return None
        raise ValueError(op)

    def is_polynomial(self) -> bool:
        return self.poly is not None

    def _numeric(self, x):
        op = self.op
        if op in _NP_FUNCS:
            return _NP_FUNCS[op](self.args[0]._numeric(x))
        return self(x)

    def integral(self, x0):
        """Numeric integral from 0 to x0 (adaptive quadrature for non-polynomials)."""
        p = self.poly
        if p is not None:
            return p.integ(lbnd=0.0)(x0)
        x0 = np.asarray(x0, dtype=float)
        flat = x0.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        vals = np.array([integrate.quad(lambda q: float(self(q)), 0.0, u,
                                        epsabs=QUAD_TOL, epsrel=0.0, limit=200)[0] for u in uniq])
        out = vals[inv].reshape(x0.shape)
        return float(out) if out.ndim == 0 else out

    def antiderivative(self, x):
        """Phi(x) = integral_0^x of the profile, for numbers or jets.

        Jets get exact derivative coefficients from the integrand; only the base
        value goes through quadrature when the profile is not polynomial.
        """
        p = self.poly
        if p is not None:
            coeffs = p.integ(lbnd=0.0).coef
            out = coeffs[-1]
            for c in coeffs[-2::-1]:
                out = out * x + c
            return out
        if not isinstance(x, J.Jet):
            return self.integral(x)
        n = x.order
        base = self.integral(x.value)
        if n == 0:
            return J.Jet(np.asarray(base)[None], 0)
        inner = self(J.Jet.variable(x.value, 0, n - 1))
        taylor = [base]
        for k in range(1, n + 1):
            ck = inner.c[J._position(n - 1)[(k - 1, 0, 0)]] if isinstance(inner, J.Jet) else (
                inner if k == 1 else 0.0)
            taylor.append(ck / k)
        return J.compose(x, taylor)

    # -- printing -------------------------------------------------------------

    def __str__(self) -> str:
        op, a = self.op, self.args
        if op == "const":
            v = self.value
            s = repr(v) if not v.is_integer() else str(int(v))
            return f"({s})" if v < 0 else s
        if op == "var":
            return "x"
        if op == "neg":
            return f"(-{a[0]})"
        if op == "pow":
            return f"({a[0]})^{int(self.value)}" if int(self.value) >= 0 else f"(1/({a[0]})^{-int(self.value)})"
        if op in _FUNCS:
            return f"{op}({a[0]})"
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[op]
        return f"({a[0]}{sym}{a[1]})"

    def __repr__(self) -> str:
        return f"Profile({self})"


X = Profile.var()
IDENTITY = X
ZERO = Profile.const(0.0)
ONE = Profile.const(1.0)


def _simplify(p: Profile) -> Profile:
    """Constant folding and 0/1 elimination (one level, applied bottom-up)."""
    if not p.args:
        return p
    args = tuple(_simplify(a) for a in p.args)
    op = p.op
    consts = [a.value if a.op == "const" else None for a in args]
    if op == "neg" and consts[0] is not None:
        return Profile.const(-consts[0])
    if op in ("add", "sub", "mul", "div") and None not in consts:
        return Profile.const(float(Profile(op, args)(0.0)))
    if op == "add":
        if consts[0] == 0.0:
            return args[1]
        if consts[1] == 0.0:
            return args[0]
    if op == "sub" and consts[1] == 0.0:
        return args[0]
    if op == "mul":
        if 0.0 in consts:
            return ZERO
        if consts[0] == 1.0:
            return args[1]
        if consts[1] == 1.0:
            return args[0]
    if op == "div" and consts[1] == 1.0:
        return args[0]
    if op == "pow":
        n = int(p.value)
        if n == 0:
            return ONE
        if n == 1:
            return args[0]
    return Profile(op, args, p.value)


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]+)|(\S))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProfileSyntaxError(f"cannot tokenize {text[pos:]!r}")
        num, name, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("sym", sym))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            want = val or kind or "token"
            raise ProfileSyntaxError(f"expected {want} at position {self.i} in {self.text!r}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.factor()
        while self.peek() in (("sym", "*"), ("sym", "/")):
            op = self.take()[1]
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self):
        node = self.base()
        while self.peek() == ("sym", "^"):
            self.take()
            sign = 1
            if self.peek() == ("sym", "-"):
                self.take()
                sign = -1
            tok = self.take("num")
            if not re.fullmatch(r"\d+", tok[1]):
                raise ProfileSyntaxError(f"exponent must be an integer, got {tok[1]!r}")
            node = node ** (sign * int(tok[1]))
        return node

    def base(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Profile.const(float(val))
        if kind == "name":
            self.take()
            if val == "x":
                return Profile.var()
            if val in _FUNCS:
                self.take("sym", "(")
                inner = self.expr()
                self.take("sym", ")")
                return Profile(val, (inner,))
            raise ProfileSyntaxError(f"unknown name {val!r}")
        if (kind, val) == ("sym", "("):
            self.take()
            inner = self.expr()
            self.take("sym", ")")
            return inner
        if (kind, val) == ("sym", "-"):
            self.take()
            return -self.factor()
        raise ProfileSyntaxError(f"unexpected {val!r} in {self.text!r}")


def parse(text: str) -> Profile:
    """Parse a profile expression in the variable ``x``."""
    p = _Parser(text)
    node = p.expr()
    if p.i != len(p.toks):
        raise ProfileSyntaxError(f"trailing input in {text!r}")
    return node


def as_profile(obj) -> Profile:
    if isinstance(obj, Profile):
        return obj
    if isinstance(obj, str):
        return parse(obj)
    if isinstance(obj, (int, float)):
        return Profile.const(obj)
    raise TypeError(f"cannot interpret {obj!r} as a profile")
