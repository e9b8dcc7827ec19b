"""Rational second-order ODEs y'' = M/N and their derivation operator."""

from __future__ import annotations

from dataclasses import dataclass, field

from .parsing import ParseError, contains, parse_equation, parse_expression
from .polyring import (
    XYZ,
    ParamCoeff,
    Poly,
    RationalFunction,
    divide_exact,
    format_poly,
    gcd,
    is_rational,
    param_symbol,
    primitive,
    substitute_params,
    to_qq,
)

_EVAL_GENS = ("x", "y", "y'", "y''")


class NonRationalRhs(ValueError):
    """The equation does not define y'' as a ratio of polynomials in x, y, y'."""


@dataclass(frozen=True)
class Soode:
    """The reduced pair (M, N) of y'' = M/N over Q(params)."""

    M: Poly
    N: Poly
    params: tuple = ()

    def __post_init__(self):
        if self.N.is_zero():
            raise ValueError("N must be nonzero")

    @classmethod
    def from_pair(cls, M: Poly, N: Poly, params=()):
        """Reduce M/N by their gcd and normalize N (primitive, positive lead)."""
        if N.is_zero():
            raise ValueError("N must be nonzero")
        if M.is_zero():
            return cls(Poly.zero(XYZ), Poly.const(XYZ, 1), tuple(params))
        g = gcd(M, N)
        if not g.is_constant():
            M = divide_exact(M, g)
            N = divide_exact(N, g)
        k, N = primitive(N)
        M = M.scale(1 / k) if is_rational(k) else M.map_coeffs(lambda c: c / k)
        return cls(M, N, tuple(params))

    @property
    def deg_M(self):
        return self.M.degree()

    @property
    def deg_N(self):
        return self.N.degree()

    @property
    def phi(self):
        return RationalFunction(self.M, self.N)

    def derivation(self):
        return Derivation(self)

    def substitute(self, bindings):
        """Pin parameters; the result is re-reduced over the remaining ones."""
        rest = tuple(p for p in self.params if p not in bindings)
        M = _restrict_params(substitute_params(self.M, bindings), rest)
        N = _restrict_params(substitute_params(self.N, bindings), rest)
        return Soode.from_pair(M, N, rest)

    def divergence(self) -> Poly:
        """N_x + N_y*y' + M_y' (appears in the S/R determination equations)."""
        z = Poly.gen(XYZ, "y'")
        return self.N.diff(0) + self.N.diff(1) * z + self.M.diff(2)

    def text(self):
        if self.N == Poly.const(XYZ, 1):
            return f"y'' = {format_poly(self.M)}"
        return f"y'' = ({format_poly(self.M)})/({format_poly(self.N)})"

    def __str__(self):
        return self.text()


@dataclass(frozen=True)
class Derivation:
    """D = N d/dx + y' N d/dy + M d/dy'."""

    soode: Soode
    coeffs: tuple = field(init=False)

    def __post_init__(self):
        s = self.soode
        z = Poly.gen(XYZ, "y'")
        object.__setattr__(self, "coeffs", (s.N, z * s.N, s.M))

    def apply_poly(self, p: Poly) -> Poly:
        a, b, c = self.coeffs
        out = Poly.zero(p.gens)
        for i, k in enumerate((a, b, c)):
            d = p.diff(i)
            if d:
                out = out + k * d
        return out

    def apply(self, f):
        """Apply to a Poly or RationalFunction; returns the same kind."""
        if isinstance(f, Poly):
            return self.apply_poly(f)
        num, den = f.num, f.den
        if den.is_constant():
            return RationalFunction(self.apply_poly(num), den)
        top = self.apply_poly(num) * den - num * self.apply_poly(den)
        return RationalFunction(top, den * den)


def _restrict_params(p: Poly, rest):
    """Re-express ParamCoeff coefficients over the remaining parameter names."""
    if not rest:
        return p.map_coeffs(lambda c: c if is_rational(c) else _to_rational_or_fail(c))
    return p.map_coeffs(lambda c: c if is_rational(c) else _reparam(c, tuple(rest)))


def _reparam(c: ParamCoeff, rest):
    from .polyring import make_coeff

    used = set(c.num.free_names()) | set(c.den.free_names())
    if not used <= set(rest):
        raise ValueError(f"coefficient {c} uses parameters outside {rest}")
    return make_coeff(c.num.drop_to(rest), c.den.drop_to(rest))


def _to_rational_or_fail(c):
    raise ValueError(f"coefficient {c} still depends on parameters")


# ---------------------------------------------------------------------------
# evaluation of syntax trees


class _Evaluator:
    """Evaluate a syntax tree to a RationalFunction in (x, y, y', y'')."""

    def __init__(self, text, params, gens=_EVAL_GENS):
        self.text = text
        self.params = tuple(params)
        self.gens = gens

    def const(self, c):
        return RationalFunction.const(self.gens, c)

    def ev(self, t):
        kind = t[0]
        if kind == "num":
            return self.const(t[1])
        if kind == "var":
            name = t[1]
            if name in self.gens:
                return RationalFunction.from_poly(Poly.gen(self.gens, name))
            return self.const(param_symbol(self.params, name))
        if kind == "neg":
            return -self.ev(t[1])
        if kind in ("add", "sub", "mul", "div"):
            a, b = self.ev(t[1]), self.ev(t[2])
            if kind == "add":
                return a + b
            if kind == "sub":
                return a - b
            if kind == "mul":
                return a * b
            if b.is_zero():
                raise NonRationalRhs("division by zero")
            return a / b
        if kind == "pow":
            base = self.ev(t[1])
            ex = self.ev(t[2])
            if not ex.is_constant() or not is_rational(ex.constant_value()):
                raise NonRationalRhs("exponents must be numeric")
            k = to_qq(ex.constant_value())
            if k.denominator != 1 or k < 0:
                raise NonRationalRhs("exponents must be nonnegative integers")
            return base ** int(k)
        if kind == "call":
            raise NonRationalRhs(f"function {t[1]} is not allowed in the equation")
        raise AssertionError(kind)


def _w_parts(rf: RationalFunction):
    """Check the y'' dependence: returns coefficients (a, b) of num = a*w + b."""
    gens = rf.gens
    if rf.den.degree_in(3) > 0:
        raise NonRationalRhs("y'' appears in a denominator")
    parts = rf.num.coeffs_in(3)
    if max(parts) > 1:
        raise NonRationalRhs("equation is not linear in y''")
    zero = Poly.zero(gens)
    return parts.get(1, zero), parts.get(0, zero)


def _to_xyz(p: Poly) -> Poly:
    return p.drop_to(XYZ)


def parse_soode(text: str, params=()) -> Soode:
    """Parse ``y'' = RHS`` or an implicit equation ``EXPR = 0`` linear in y''."""
    params = tuple(params)
    for p in params:
        if p in _EVAL_GENS or not p.isidentifier():
            raise ValueError(f"invalid parameter name {p!r}")
    lhs, rhs = parse_equation(text, params)
    ev = _Evaluator(text, params)
    is_w = lambda t: t == ("var", "y''")
    if rhs is None:
        expr = ev.ev(lhs)
    elif lhs == ("var", "y''"):
        if contains(rhs, is_w):
            raise NonRationalRhs("y'' appears on the right-hand side")
        r = ev.ev(rhs)
        return Soode.from_pair(_to_xyz(r.num), _to_xyz(r.den), params)
    else:
        expr = ev.ev(lhs) - ev.ev(rhs)
    a, b = _w_parts(expr)
    if a.is_zero():
        raise NonRationalRhs("equation does not involve y''")
    if a.degree_in(3) > 0 or b.degree_in(3) > 0:
        raise NonRationalRhs("equation is not linear in y''")
    return Soode.from_pair(_to_xyz(-b), _to_xyz(a), params)


def parse_param_value(text: str, params=()):
    """Evaluate a pin value such as ``6/25*c1^2`` to a Coefficient."""
    tree = parse_expression(text, params)
    ev = _Evaluator(text, params, gens=("x",))
    if contains(tree, lambda t: t[0] == "var" and t[1] in _EVAL_GENS):
        raise ParseError("parameter values may not use x, y or derivatives", text, 0)
    r = ev.ev(tree)
    return r.constant_value()


def parse_pin(text: str, params=()):
    """Split ``NAME=EXPR`` and evaluate the value over the other parameters."""
    if "=" not in text:
        raise ParseError("pin must look like NAME=EXPR", text, 0)
    name, value = text.split("=", 1)
    name = name.strip()
    if name not in params:
        raise ParseError(f"pinned name {name!r} is not a declared parameter", text, 0)
    return name, parse_param_value(value, params)


def poly_from_text(text: str, params=()) -> Poly:
    """Parse a polynomial in x, y, y' (used by tests and the CLI)."""
    tree = parse_expression(text, params)
    r = _Evaluator(text, params).ev(tree)
    if not r.is_polynomial():
        raise NonRationalRhs(f"{text!r} is not a polynomial")
    return _to_xyz(r.as_poly())


def rational_from_text(text: str, params=()) -> RationalFunction:
    tree = parse_expression(text, params)
    r = _Evaluator(text, params).ev(tree)
    return RationalFunction(_to_xyz(r.num), _to_xyz(r.den))
