"""One-forms from S/R solutions and their first integrals.

For an S/R solution the form R[(M + S y') dx - S dy - N dy'] is exact.  Its
potential I is built by nested indefinite integrals, one variable at a time
(x, then y, then y'), each time integrating what the previous partial result
fails to explain.  Power-product factors with fractional exponents are kept
outside the rational parts; such pieces are integrated by an ansatz
h * T with h rational, else left as unevaluated integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import floor

from . import exprtree as ex
from .algsys import CoeffPoly, Inconsistent, linear_solve, match_coefficients
from .darboux import monomials_upto
from .odemodel import Soode
from .polyring import (
    XYZ,
    Poly,
    QQ,
    RationalFunction,
    content_in,
    divide_exact,
    squarefree_part,
    to_qq,
)
from .ratint import integrate_rational

Z = Poly.gen(XYZ, "y'")


@dataclass
class OneForm:
    """(a dx + b dy + c dy') * T with a, b, c rational and T = prod v^m.

    ``factors`` holds (v, m) with 0 < m < 1 after integer parts are folded
    into a, b and c.
    """

    a: RationalFunction
    b: RationalFunction
    c: RationalFunction
    factors: list = field(default_factory=list)

    def power_product(self) -> ex.Expr:
        return ex.mul(*(ex.power(ex.rat(v), m) for v, m in self.factors)) if self.factors else ex.ONE

    def components(self):
        """(A, B, C) as expressions."""
        T = self.power_product()
        return tuple(ex.mul(ex.rat(r), T) for r in (self.a, self.b, self.c))

    @property
    def A(self):
        return self.components()[0]

    @property
    def B(self):
        return self.components()[1]

    @property
    def C(self):
        return self.components()[2]

    def log_gradient(self):
        """(T_x/T, T_y/T, T_y'/T)."""
        out = []
        for i in range(3):
            acc = RationalFunction.const(XYZ, 0)
            for v, m in self.factors:
                dv = v.diff(i)
                if dv:
                    acc = acc + RationalFunction(dv.scale(to_qq(m)), v)
            out.append(acc)
        return tuple(out)


def one_form(s: Soode, sr) -> OneForm:
    """The exact form R*[(M + S y') dx - S dy - N dy'] of an S/R solution."""
    scale = RationalFunction.const(XYZ, 1)
    frac = []
    for v, _, m in sr.factors:
        m = to_qq(m)
        k = floor(m)
        if k:
            scale = scale * RationalFunction.from_poly(v) ** int(k)
        if m - k:
            frac.append((v, m - k))
    P, Q = sr.P, sr.Q
    a = scale * RationalFunction.from_poly(Q * s.M + P * Z)
    b = scale * RationalFunction.from_poly(-P)
    c = scale * RationalFunction.from_poly(-(Q * s.N))
    return OneForm(a, b, c, frac)


def check_closed(w: OneForm) -> bool:
    """A_y = B_x, A_y' = C_x, B_y' = C_y, divided by the power product."""
    L = w.log_gradient()
    comps = (w.a, w.b, w.c)

    def d(k, i):
        return comps[k].diff(i) + comps[k] * L[i]

    return d(0, 1) == d(1, 0) and d(0, 2) == d(2, 0) and d(1, 2) == d(2, 1)


@dataclass
class FirstIntegral:
    expr: ex.Expr
    sr: object
    closed_form: bool
    verified: bool = False
    form: OneForm | None = None
    order: tuple = (0, 1, 2)
    note: str = ""

    @property
    def text(self):
        return ex.to_text(self.expr)


# ---------------------------------------------------------------------------
# one-variable steps


def _ansatz_power(r: RationalFunction, factors, var: int, max_extra=2):
    """Rational h with d/dvar (h T) = r T, T = prod v^m, or None."""
    if r.is_zero():
        return RationalFunction.const(XYZ, 0)
    den = r.den
    cont = content_in(den, var)
    pp = divide_exact(den, cont) if not cont.is_constant() else den
    E = cont * divide_exact(pp, squarefree_part(pp)) if not pp.is_constant() else cont
    V = Poly.const(XYZ, 1)
    for v, _ in factors:
        V = V * v
    Lnum = Poly.zero(XYZ)
    for v, m in factors:
        dv = v.diff(var)
        if dv:
            Lnum = Lnum + (dv * divide_exact(V, v)).scale(to_qq(m))
    dmax = max(r.num.degree() + E.degree() - den.degree() + max_extra, 0)
    monos = monomials_upto(dmax)
    names = [f"h{k}" for k in range(len(monos))]
    ug = tuple(names)
    H = CoeffPoly.generic(ug, dict(zip(monos, names)))
    ident = (H.diff(var) * E - H * E.diff(var)) * (V * den) + H * (E * Lnum * den) \
        - CoeffPoly.from_poly(ug, r.num * E * E * V)
    sys = match_coefficients(ident, ug)
    try:
        br = linear_solve(sys)
    except (Inconsistent, ValueError):
        return None
    vals = {n: QQ(0) for n in br.free}
    for n, val in br.assignments.items():
        vals[n] = RationalFunction(val.num.subs_many(vals), val.den.subs_many(vals)).constant_value()
    Hp = H.instantiate(vals, XYZ)
    return RationalFunction(Hp, E)


def _integrate_step(integrand: ex.Expr, var: int, factors):
    """Integrate an expression in one variable; returns (Expr, closed)."""
    if ex.is_zero_node(integrand):
        return ex.ZERO, True
    try:
        nf = ex.normal_form(integrand)
    except ex.IncomparableBasis:
        return ex.Integral(integrand, var), False
    if nf.is_zero():
        return ex.ZERO, True
    r = nf.rational_part()
    if r is not None:
        res = integrate_rational(r, var)
        if res is not None:
            return res, True
        return ex.Integral(ex.rat(r), var), False
    # a single power-product key times a rational coefficient
    one = nf.single()
    if one is not None and factors:
        (pw, tr), coeff = one
        if not tr:
            T = ex.mul(*(ex.power(ex.rat(v), m) for v, m in factors))
            tnf = ex.normal_form(ex.mul(ex.rat(coeff), T))
            # express the integrand as q * T with q rational
            ratio = _ratio_to(nf, tnf, coeff)
            if ratio is not None:
                h = _ansatz_power(ratio, factors, var)
                if h is not None:
                    return ex.mul(ex.rat(h), T), True
    return ex.Integral(ex.from_normal_form(nf), var), False


def _ratio_to(nf, tnf, coeff):
    """q with nf == q * T when tnf = coeff * T (both single keys)."""
    a = nf.single()
    b = tnf.single()
    if a is None or b is None or a[0] != b[0]:
        return None
    return a[1] / b[1] * coeff


def _nested(w: OneForm, order):
    comps = w.components()
    total = ex.ZERO
    closed = True
    for var in order:
        target = comps[var]
        if not ex.is_zero_node(total):
            target = ex.add(target, ex.neg(ex.differentiate_expr(total, var)))
        piece, ok = _integrate_step(target, var, w.factors)
        closed = closed and ok
        total = ex.add(total, piece)
    return total, closed


def integrate_invariant(s: Soode, sr, orders=None) -> FirstIntegral:
    """Potential of the one-form of ``sr`` by nested integration.

    The x, y, y' order is tried first; when it leaves an unevaluated integral
    the other orders are tried and the first closed form is kept.
    """
    w = one_form(s, sr)
    if not check_closed(w):
        raise ValueError("the one-form of this S/R solution is not closed")
    orders = orders or [(0, 1, 2)] + [p for p in permutations(range(3)) if p != (0, 1, 2)]
    first = None
    for order in orders:
        try:
            expr, closed = _nested(w, order)
        except ex.IncomparableBasis:
            continue
        if first is None:
            first = (expr, closed, order)
        if closed:
            fi = FirstIntegral(expr, sr, True, form=w, order=order)
            fi.verified = verify_invariant(s, fi)
            return fi
    if first is None:
        expr = ex.Integral(w.A, 0)
        first = (expr, False, (0, 1, 2))
    expr, closed, order = first
    fi = FirstIntegral(expr, sr, closed, form=w, order=order)
    fi.verified = verify_invariant(s, fi)
    return fi


def gradient_matches(fi: FirstIntegral) -> bool:
    """dI == (A, B, C) componentwise (closed forms)."""
    w = fi.form
    for k, comp in enumerate(w.components()):
        d = ex.differentiate_expr(fi.expr, k)
        if not ex.is_identically_zero(ex.add(d, ex.neg(comp))):
            return False
    return True


def verify_invariant(s: Soode, fi: FirstIntegral) -> bool:
    """D[I] == 0 for closed forms; otherwise closedness plus available gradients."""
    if fi.closed_form and not ex.contains_integral(fi.expr):
        try:
            ok = ex.is_identically_zero(ex.apply_derivation(s, fi.expr))
        except ex.IncomparableBasis:
            fi.note = "zero test undecided: incomparable power bases"
            return False
        if ok and fi.form is not None:
            ok = gradient_matches(fi)
        return ok
    if fi.form is None or not check_closed(fi.form):
        return False
    for k, comp in enumerate(fi.form.components()):
        d = ex.differentiate_expr(fi.expr, k)
        if ex.contains_integral(d):
            continue
        try:
            if not ex.is_identically_zero(ex.add(d, ex.neg(comp))):
                return False
        except ex.IncomparableBasis:
            return False
    fi.note = "certified by closedness of the one-form"
    return True


def verify_expression(s: Soode, e: ex.Expr) -> bool:
    """D[e] == 0 for a user-supplied closed-form expression."""
    if ex.contains_integral(e):
        raise ValueError("expression contains an unevaluated integral")
    return ex.is_identically_zero(ex.apply_derivation(s, e))


def gradients_proportional(e1: ex.Expr, e2: ex.Expr) -> bool:
    """grad e1 == c * grad e2 for a nonzero constant c."""
    g1 = [ex.differentiate_expr(e1, k) for k in range(3)]
    g2 = [ex.differentiate_expr(e2, k) for k in range(3)]
    c = None
    for a, b in zip(g1, g2):
        na, nb = ex.normal_form(a), ex.normal_form(b)
        if na.is_zero() or nb.is_zero():
            if na.is_zero() != nb.is_zero():
                return False
            continue
        key = min(nb.terms, key=ex._key_text)
        if key not in na.terms:
            return False
        ratio = na.terms[key] / nb.terms[key]
        if not ratio.is_constant():
            return False
        c = ratio.constant_value()
        break
    if c is None:
        return True
    return all(ex.is_identically_zero(ex.add(x, ex.neg(ex.const_mul(c, y)))) for x, y in zip(g1, g2))


def _proportional_general(g1, g2):
    """Cross products vanish and the ratio has zero gradient (sums allowed)."""
    for i in range(3):
        for j in range(i + 1, 3):
            if not ex.is_identically_zero(ex.add(ex.mul(g1[i], g2[j]), ex.neg(ex.mul(g1[j], g2[i])))):
                return False
    return True


def gradients_parallel(e1: ex.Expr, e2: ex.Expr) -> bool:
    """grad e1 x grad e2 == 0 (functional dependence)."""
    g1 = [ex.differentiate_expr(e1, k) for k in range(3)]
    g2 = [ex.differentiate_expr(e2, k) for k in range(3)]
    return _proportional_general(g1, g2)
