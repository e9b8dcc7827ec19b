"""Elementary expression trees for first integrals.

Trees are built from rational functions in (x, y, y') with sums, products,
rational powers, ``ln``, ``arctan``, ``arcsin`` and unevaluated integrals.
Differentiation is exact.  Zero testing collects an expression into a
combination of basis elements (fractional power products of pairwise coprime
squarefree polynomials, and transcendental atoms) with rational-function
coefficients; distinct basis elements are taken as independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .parsing import ParseError, parse_expression
from .polyring import (
    XYZ,
    ParamCoeff,
    Poly,
    QQ,
    RationalFunction,
    coprime_basis,
    exponents_over,
    format_poly,
    is_rational,
    param_symbol,
    primitive,
    to_qq,
)

VAR_NAMES = XYZ


class IncomparableBasis(ValueError):
    """Two power bases whose multiplicative relation cannot be decided."""


class UnsupportedNode(TypeError):
    """A node kind that the requested operation does not handle."""


class Expr:
    """Base class; nodes are immutable and hashable."""

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, neg(_lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        return mul(self, power(_lift(other), -1))

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Rat(Expr):
    rf: RationalFunction

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Sum(Expr):
    terms: tuple

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Prod(Expr):
    factors: tuple

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exp: object

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Log(Expr):
    arg: RationalFunction

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Atan(Expr):
    """arctan(sqrt(scale) * arg); scale is a positive squarefree integer."""

    arg: RationalFunction
    scale: int = 1

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Asin(Expr):
    arg: RationalFunction

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class Integral(Expr):
    """Unevaluated indefinite integral of ``integrand`` in generator ``var``."""

    integrand: Expr
    var: int

    __str__ = Expr.__str__


@dataclass(frozen=True, eq=True)
class ConstMul(Expr):
    c: object
    e: Expr

    __str__ = Expr.__str__


# ---------------------------------------------------------------------------
# constructors


def rat(value) -> Rat:
    if isinstance(value, RationalFunction):
        return Rat(value)
    if isinstance(value, Poly):
        return Rat(RationalFunction.from_poly(value))
    return Rat(RationalFunction.const(XYZ, value))


def _lift(e):
    return e if isinstance(e, Expr) else rat(e)


def gen(i) -> Rat:
    return rat(Poly.gen(XYZ, XYZ[i]))


ZERO = rat(0)
ONE = rat(1)


def is_zero_node(e):
    return isinstance(e, Rat) and e.rf.is_zero()


def add(*es) -> Expr:
    terms = []
    acc = None
    for e in es:
        parts = e.terms if isinstance(e, Sum) else (e,)
        for t in parts:
            if isinstance(t, Rat):
                acc = t.rf if acc is None else acc + t.rf
            else:
                terms.append(t)
    if acc is not None and not acc.is_zero():
        terms.insert(0, Rat(acc))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def neg(e) -> Expr:
    if isinstance(e, Rat):
        return Rat(-e.rf)
    if isinstance(e, ConstMul):
        return const_mul(-e.c, e.e)
    if isinstance(e, Sum):
        return add(*(neg(t) for t in e.terms))
    return const_mul(QQ(-1), e)


def const_mul(c, e) -> Expr:
    if is_rational(c) and c == 1:
        return e
    if not c:
        return ZERO
    if isinstance(e, Rat):
        return Rat(e.rf * RationalFunction.const(XYZ, c))
    if isinstance(e, ConstMul):
        return const_mul(c * e.c, e.e)
    return ConstMul(c, e)


def mul(*es) -> Expr:
    factors = []
    acc = None
    for e in es:
        parts = e.factors if isinstance(e, Prod) else (e,)
        for f in parts:
            if isinstance(f, Rat):
                acc = f.rf if acc is None else acc * f.rf
            elif isinstance(f, ConstMul):
                c = RationalFunction.const(XYZ, f.c)
                acc = c if acc is None else acc * c
                factors.extend(f.e.factors if isinstance(f.e, Prod) else (f.e,))
            else:
                factors.append(f)
    if acc is not None and acc.is_zero():
        return ZERO
    if not factors:
        return Rat(acc) if acc is not None else ONE
    if acc is not None and acc != 1:
        if acc.is_constant():
            inner = factors[0] if len(factors) == 1 else Prod(tuple(factors))
            return ConstMul(acc.constant_value(), inner)
        factors.insert(0, Rat(acc))
    if len(factors) == 1:
        return factors[0]
    return Prod(tuple(factors))


def power(base, r) -> Expr:
    """base**r for an exact rational r; integer powers of rationals fold."""
    r = to_qq(r)
    base = _lift(base)
    if r == 0:
        return ONE
    if r == 1:
        return base
    if isinstance(base, Rat):
        if r.denominator == 1:
            return Rat(base.rf ** int(r))
        if base.rf.is_constant() and base.rf.constant_value() == 1:
            return ONE
        return Pow(base, r)
    if isinstance(base, Pow):
        return power(base.base, base.exp * r)
    if isinstance(base, Prod):
        return mul(*(power(f, r) for f in base.factors))
    return Pow(base, r)


def log(arg) -> Expr:
    arg = _as_rf(arg)
    if arg.is_zero():
        raise ValueError("logarithm of zero")
    if arg.is_constant() and arg.constant_value() == 1:
        return ZERO
    return Log(arg)


def atan(arg, scale=1) -> Expr:
    arg = _as_rf(arg)
    if arg.is_zero():
        return ZERO
    return Atan(arg, int(scale))


def asin(arg) -> Expr:
    arg = _as_rf(arg)
    if arg.is_zero():
        return ZERO
    return Asin(arg)


def _as_rf(arg):
    if isinstance(arg, RationalFunction):
        return arg
    if isinstance(arg, Poly):
        return RationalFunction.from_poly(arg)
    if isinstance(arg, Rat):
        return arg.rf
    return RationalFunction.const(XYZ, arg)


# ---------------------------------------------------------------------------
# differentiation


def differentiate_expr(e: Expr, var) -> Expr:
    """Exact partial derivative in generator ``var`` (index or name)."""
    i = XYZ.index(var) if isinstance(var, str) else var
    return _d(e, i)


def _d(e, i):
    if isinstance(e, Rat):
        return Rat(e.rf.diff(i))
    if isinstance(e, Sum):
        return add(*(_d(t, i) for t in e.terms))
    if isinstance(e, ConstMul):
        return const_mul(e.c, _d(e.e, i))
    if isinstance(e, Prod):
        out = []
        fs = e.factors
        for k, f in enumerate(fs):
            df = _d(f, i)
            if is_zero_node(df):
                continue
            out.append(mul(*(fs[:k] + (df,) + fs[k + 1:])))
        return add(*out)
    if isinstance(e, Pow):
        db = _d(e.base, i)
        if is_zero_node(db):
            return ZERO
        return mul(rat(e.exp), power(e.base, e.exp - 1), db)
    if isinstance(e, Log):
        return Rat(e.arg.diff(i) / e.arg)
    if isinstance(e, Atan):
        w = e.arg
        dw = w.diff(i)
        if dw.is_zero():
            return ZERO
        if e.scale == 1:
            return Rat(dw / (w * w + 1))
        s = RationalFunction.const(XYZ, e.scale)
        return mul(Pow(rat(e.scale), QQ(1, 2)), Rat(dw / (s * w * w + 1)))
    if isinstance(e, Asin):
        w = e.arg
        dw = w.diff(i)
        if dw.is_zero():
            return ZERO
        return mul(Rat(dw), power(Rat(1 - w * w), QQ(-1, 2)))
    if isinstance(e, Integral):
        if e.var == i:
            return e.integrand
        # differentiation under the integral sign
        inner = _d(e.integrand, i)
        return ZERO if is_zero_node(inner) else Integral(inner, e.var)
    raise UnsupportedNode(type(e).__name__)


def contains_integral(e) -> bool:
    if isinstance(e, Integral):
        return True
    if isinstance(e, Sum):
        return any(contains_integral(t) for t in e.terms)
    if isinstance(e, Prod):
        return any(contains_integral(f) for f in e.factors)
    if isinstance(e, Pow):
        return contains_integral(e.base)
    if isinstance(e, ConstMul):
        return contains_integral(e.e)
    return False


def apply_derivation(soode, e: Expr) -> Expr:
    """N I_x + y' N I_y + M I_y' for an expression I."""
    a, b, c = soode.derivation().coeffs
    parts = []
    for k, coef in zip(range(3), (a, b, c)):
        if coef.is_zero():
            continue
        parts.append(mul(rat(coef), _d(e, k)))
    return add(*parts)


# ---------------------------------------------------------------------------
# normal form and zero testing


class _Basis:
    """Coprime squarefree atoms shared by all power bases and log arguments."""

    def __init__(self, polys):
        self.atoms = coprime_basis(polys)
        self.params = []

    def split(self, p: Poly):
        """p -> list of (atom key, integer exponent) including constant atoms."""
        content, prim = primitive(p)
        out = []
        if not prim.is_constant():
            got = exponents_over(prim, self.atoms)
            if got is None:
                # not covered by the refinement; should not happen
                raise IncomparableBasis(f"cannot express {prim} over the basis")
            unit, exps = got
            content = content * unit
            out.extend((("poly", a), k) for a, k in zip(self.atoms, exps) if k)
        else:
            content = content * prim.constant_value()
        out.extend(_split_constant(content, self))
        return out


def _split_constant(c, basis):
    if isinstance(c, ParamCoeff):
        if c not in basis.params:
            basis.params.append(c)
        if len(basis.params) > 1:
            raise IncomparableBasis("several parameter-dependent constants under powers")
        return [(("param", c), 1)]
    c = to_qq(c)
    out = []
    if c < 0:
        out.append((("neg",), 1))
        c = -c
    for n, sign in ((int(c.numerator), 1), (int(c.denominator), -1)):
        for p, k in _factor_int(n).items():
            out.append((("prime", p), sign * k))
    return out


def _factor_int(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
        if d > 10 ** 6:
            raise IncomparableBasis("integer too large to factor")
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _atom_value(key) -> RationalFunction:
    kind = key[0]
    if kind == "poly":
        return RationalFunction.from_poly(key[1])
    if kind == "neg":
        return RationalFunction.const(XYZ, -1)
    if kind == "prime":
        return RationalFunction.const(XYZ, key[1])
    return RationalFunction.const(XYZ, key[1])


def _atom_sort(key):
    kind = key[0]
    if kind == "poly":
        return (0, format_poly(key[1]))
    if kind in ("prime", "lnprime"):
        return (1, str(key[1]))
    return (2, str(key[1:]))


class NormalForm:
    """sum over basis keys of rational-function coefficients.

    A key is (powers, transcendentals): powers is a sorted tuple of
    (atom, exponent) with 0 < exponent < 1, transcendentals a sorted tuple of
    (atom, multiplicity).
    """

    def __init__(self, terms=None):
        self.terms = {}
        for k, v in (terms or {}).items():
            if not v.is_zero():
                self.terms[k] = v

    @classmethod
    def rational(cls, rf):
        return cls({((), ()): rf})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                s = out[k] + v
                if s.is_zero():
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = v
        return NormalForm(out)

    def scale(self, rf):
        return NormalForm({k: v * rf for k, v in self.terms.items()})

    def __mul__(self, other):
        out = NormalForm()
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key, factor = _merge_keys(k1, k2)
                out = out + NormalForm({key: v1 * v2 * factor})
        return out

    def single(self):
        if len(self.terms) != 1:
            return None
        return next(iter(self.terms.items()))

    def rational_part(self):
        """The coefficient of the trivial key when nothing else is present."""
        if not self.terms:
            return RationalFunction.const(XYZ, 0)
        if set(self.terms) == {((), ())}:
            return self.terms[((), ())]
        return None


def _merge_keys(k1, k2):
    pw = dict(k1[0])
    factor = RationalFunction.const(XYZ, 1)
    for a, e in k2[0]:
        s = pw.get(a, Fraction(0)) + e
        if s >= 1:
            factor = factor * _atom_value(a)
            s -= 1
        if s == 0:
            pw.pop(a, None)
        else:
            pw[a] = s
    tr = dict(k1[1])
    for a, m in k2[1]:
        tr[a] = tr.get(a, 0) + m
    key = (tuple(sorted(pw.items(), key=lambda t: _atom_sort(t[0]))),
           tuple(sorted(tr.items(), key=lambda t: _trans_sort(t[0]))))
    return key, factor


def _trans_sort(a):
    return (a[0], str(a[1:]))


def _gather_polys(e, out):
    if isinstance(e, (Sum,)):
        for t in e.terms:
            _gather_polys(t, out)
    elif isinstance(e, Prod):
        for f in e.factors:
            _gather_polys(f, out)
    elif isinstance(e, ConstMul):
        _gather_polys(e.e, out)
    elif isinstance(e, Pow):
        if isinstance(e.base, Rat):
            out.extend([e.base.rf.num, e.base.rf.den])
        else:
            _gather_polys(e.base, out)
    elif isinstance(e, Log):
        out.extend([e.arg.num, e.arg.den])
    elif isinstance(e, Integral):
        _gather_polys(e.integrand, out)


def normal_form(e: Expr, basis: _Basis | None = None) -> NormalForm:
    if basis is None:
        polys = []
        _gather_polys(e, polys)
        basis = _Basis([p for p in polys if not p.is_constant()])
    return _nf(e, basis)


def _nf(e, basis) -> NormalForm:
    if isinstance(e, Rat):
        return NormalForm.rational(e.rf)
    if isinstance(e, Sum):
        out = NormalForm()
        for t in e.terms:
            out = out + _nf(t, basis)
        return out
    if isinstance(e, ConstMul):
        return _nf(e.e, basis).scale(RationalFunction.const(XYZ, e.c))
    if isinstance(e, Prod):
        out = NormalForm.rational(RationalFunction.const(XYZ, 1))
        for f in e.factors:
            out = out * _nf(f, basis)
        return out
    if isinstance(e, Pow):
        r = to_qq(e.exp)
        inner = _nf(e.base, basis)
        if r.denominator == 1:
            return _int_power(inner, int(r))
        one = inner.single()
        if one is None:
            raise IncomparableBasis("fractional power of a sum")
        (pw, tr), coeff = one
        if tr:
            raise IncomparableBasis("fractional power of a transcendental term")
        pairs = basis.split(coeff.num) + [(a, -k) for a, k in basis.split(coeff.den)]
        rr = Fraction(int(r.numerator), int(r.denominator))
        for a, ex in pw:
            pairs.append((a, ex))
        key, factor = _power_key_fraction(pairs, rr)
        return NormalForm({(key, ()): factor})
    if isinstance(e, Log):
        pairs = basis.split(e.arg.num) + [(a, -k) for a, k in basis.split(e.arg.den)]
        out = NormalForm()
        for a, k in pairs:
            atom = ("ln",) + a
            out = out + NormalForm({((), ((atom, 1),)): RationalFunction.const(XYZ, k)})
        return out
    if isinstance(e, Atan):
        return NormalForm({((), ((("atan", e.arg, e.scale), 1),)): RationalFunction.const(XYZ, 1)})
    if isinstance(e, Asin):
        return NormalForm({((), ((("asin", e.arg), 1),)): RationalFunction.const(XYZ, 1)})
    if isinstance(e, Integral):
        return NormalForm({((), ((("int", e), 1),)): RationalFunction.const(XYZ, 1)})
    raise UnsupportedNode(type(e).__name__)


def _power_key_fraction(pairs, r: Fraction):
    expo = {}
    for a, k in pairs:
        expo[a] = expo.get(a, Fraction(0)) + Fraction(k) * r
    factor = RationalFunction.const(XYZ, 1)
    key = {}
    for a, ex in expo.items():
        fl = floor(ex)
        frac = ex - fl
        if fl:
            factor = factor * _atom_value(a) ** int(fl)
        if frac:
            key[a] = frac
    return tuple(sorted(key.items(), key=lambda t: _atom_sort(t[0]))), factor


def _int_power(nf: NormalForm, k: int) -> NormalForm:
    if k >= 0:
        out = NormalForm.rational(RationalFunction.const(XYZ, 1))
        for _ in range(k):
            out = out * nf
        return out
    one = nf.single()
    if one is None:
        raise IncomparableBasis("negative power of a sum")
    (pw, tr), coeff = one
    if tr:
        raise IncomparableBasis("negative power of a transcendental term")
    pairs = [(a, -ex) for a, ex in pw]
    key, factor = _power_key_fraction(pairs, Fraction(1))
    base = NormalForm({(key, ()): factor / coeff})
    return _int_power(base, -k)


def is_identically_zero(e: Expr) -> bool:
    """Decide e == 0 over the basis of distinct power products and atoms."""
    return normal_form(e).is_zero()


def simplify(e: Expr) -> Expr:
    """Rebuild e from its normal form (collects like terms)."""
    polys = []
    _gather_polys(e, polys)
    basis = _Basis([p for p in polys if not p.is_constant()])
    return from_normal_form(_nf(e, basis))


def from_normal_form(nf: NormalForm) -> Expr:
    parts = []
    for (pw, tr), coeff in sorted(nf.terms.items(), key=lambda kv: _key_text(kv[0])):
        factors = [Rat(coeff)]
        for a, ex in pw:
            factors.append(Pow(Rat(_atom_value(a)), QQ(ex.numerator, ex.denominator)))
        for a, m in tr:
            node = _trans_node(a)
            for _ in range(m):
                factors.append(node)
        parts.append(mul(*factors))
    return add(*parts)


def _key_text(key):
    pw, tr = key
    return (len(pw) + len(tr), str([(str(_atom_value(a)), str(e)) for a, e in pw]),
            str([(str(a[0]), str(a[1:])) for a, _ in tr]))


def _trans_node(a):
    kind = a[0]
    if kind == "ln":
        return Log(_atom_value(a[1:]))
    if kind == "atan":
        return Atan(a[1], a[2])
    if kind == "asin":
        return Asin(a[1])
    if kind == "int":
        return a[1]
    raise AssertionError(kind)


# ---------------------------------------------------------------------------
# text


def _rf_text(rf: RationalFunction) -> str:
    if rf.den.is_constant():
        return format_poly(rf.num.scale(1 / rf.den.constant_value()))
    return f"({format_poly(rf.num)})/({format_poly(rf.den)})"


def _paren(s):
    return f"({s})"


def _needs_paren(s):
    depth = 0
    for k, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-/" and k > 0:
            return True
    return False


def to_text(e: Expr) -> str:
    """Infix text readable by :func:`parse_invariant`."""
    if isinstance(e, Rat):
        return _rf_text(e.rf)
    if isinstance(e, Sum):
        out = to_text(e.terms[0])
        for t in e.terms[1:]:
            if isinstance(t, ConstMul) and is_rational(t.c) and t.c < 0:
                out += " - " + to_text(const_mul(-t.c, t.e))
                continue
            s = to_text(t)
            if s.startswith("-") and not _needs_paren(s[1:]):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out
    if isinstance(e, Prod):
        parts = []
        for f in e.factors:
            s = to_text(f)
            parts.append(_paren(s) if _needs_paren(s) or isinstance(f, Sum) else s)
        return "*".join(parts)
    if isinstance(e, ConstMul):
        s = to_text(e.e)
        c = e.c
        cs = str(to_qq(c)) if is_rational(c) else f"({c})"
        if is_rational(c) and c == -1:
            return "-" + (_paren(s) if _needs_paren(s) else s)
        return f"{cs}*" + (_paren(s) if _needs_paren(s) or s.startswith("-") else s)
    if isinstance(e, Pow):
        s = to_text(e.base)
        if not (isinstance(e.base, Rat) and e.base.rf.is_polynomial() and len(e.base.rf.num) == 1
                and e.base.rf.num.is_monomial() and not s.startswith("-") and "*" not in s
                and "^" not in s):
            s = _paren(s)
        r = to_qq(e.exp)
        return f"{s}^({r})" if (r.denominator != 1 or r < 0) else f"{s}^{r}"
    if isinstance(e, Log):
        return f"ln({_rf_text(e.arg)})"
    if isinstance(e, Atan):
        if e.scale == 1:
            return f"arctan({_rf_text(e.arg)})"
        return f"arctan(sqrt({e.scale})*({_rf_text(e.arg)}))"
    if isinstance(e, Asin):
        return f"arcsin({_rf_text(e.arg)})"
    if isinstance(e, Integral):
        return f"Int({to_text(e.integrand)}, {XYZ[e.var]})"
    raise UnsupportedNode(type(e).__name__)


# ---------------------------------------------------------------------------
# parsing


def parse_invariant(text: str, params=()) -> Expr:
    """Parse invariant text (ln, log, arctan, arcsin, sqrt, Int) to a tree."""
    params = tuple(params)
    tree = parse_expression(text, params)
    return _build(tree, text, params)


def _surd_times_rational(e):
    """(d, w) when e == sqrt(d) * w with d a squarefree integer > 1."""
    try:
        one = normal_form(e).single()
    except IncomparableBasis:
        return None
    if one is None:
        return None
    (pw, tr), coeff = one
    if tr or not pw:
        return None
    d = 1
    for atom, r in pw:
        if atom[0] != "prime" or r != Fraction(1, 2):
            return None
        d *= atom[1]
    return d, coeff


def _build(t, text, params):
    kind = t[0]
    if kind == "num":
        return rat(t[1])
    if kind == "var":
        name = t[1]
        if name == "y''":
            raise ParseError("y'' may not appear in an invariant", text, 0)
        if name in XYZ:
            return gen(XYZ.index(name))
        return rat(param_symbol(params, name))
    if kind == "neg":
        return neg(_build(t[1], text, params))
    if kind in ("add", "sub", "mul", "div"):
        a = _build(t[1], text, params)
        b = _build(t[2], text, params)
        if kind == "add":
            return add(a, b)
        if kind == "sub":
            return add(a, neg(b))
        if kind == "mul":
            return mul(a, b)
        if is_zero_node(b):
            raise ParseError("division by zero", text, 0)
        return mul(a, power(b, -1))
    if kind == "pow":
        base = _build(t[1], text, params)
        ex = _build(t[2], text, params)
        if not (isinstance(ex, Rat) and ex.rf.is_constant() and is_rational(ex.rf.constant_value())):
            raise ParseError("exponents must be rational numbers", text, 0)
        return power(base, ex.rf.constant_value())
    if kind == "call":
        fname, args = t[1], t[2]
        if fname == "Int":
            if len(args) != 2 or args[1][0] != "var" or args[1][1] not in XYZ:
                raise ParseError("Int needs an integrand and one of x, y, y'", text, 0)
            return Integral(_build(args[0], text, params), XYZ.index(args[1][1]))
        if len(args) != 1:
            raise ParseError(f"{fname} takes one argument", text, 0)
        arg = _build(args[0], text, params)
        if fname == "sqrt":
            return power(arg, QQ(1, 2))
        if fname == "arctan" and not isinstance(arg, Rat):
            scaled = _surd_times_rational(arg)
            if scaled is not None:
                return atan(scaled[1], scale=scaled[0])
        if not isinstance(arg, Rat):
            raise ParseError(f"the argument of {fname} must be a rational function", text, 0)
        if fname == "ln":
            return log(arg.rf)
        if fname == "arctan":
            return atan(arg.rf)
        if fname == "arcsin":
            return asin(arg.rf)
    raise ParseError(f"unsupported construct {kind}", text, 0)
