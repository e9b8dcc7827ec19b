"""Integration of rational functions in one of x, y, y'.

The other two variables (and any parameters) form the coefficient field K.
The integral is split into a polynomial part, a rational part from Hermite
reduction, and a logarithmic part whose residues must be constants: rational
residues give ``c*ln(S_c)``; a remaining degree-2 factor with a conjugate
pair of residues gives ``ln`` plus ``arctan``.  Anything else is reported as
not integrable here (``None``) so the caller can fall back to an unevaluated
integral.
"""

from __future__ import annotations

from functools import reduce

from . import exprtree as ex
from .algsys import rational_roots
from .polyring import (
    XYZ,
    Poly,
    QQ,
    RationalFunction,
    coeff_sqrt,
    is_rational,
    lcm,
    primitive,
    rational_sqrt,
    to_qq,
)


class UPoly:
    """Dense univariate polynomial over K = rational functions free of ``var``."""

    __slots__ = ("c", "var")

    def __init__(self, coeffs, var):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.c = coeffs
        self.var = var

    @classmethod
    def from_poly(cls, p: Poly, var, scale: RationalFunction | None = None):
        parts = p.coeffs_in(var)
        n = max(parts) if parts else -1
        out = []
        for k in range(n + 1):
            q = parts.get(k)
            r = RationalFunction.from_poly(q) if q is not None else _zero()
            out.append(r / scale if scale is not None else r)
        return cls(out, var)

    @classmethod
    def const(cls, r, var):
        return cls([r], var)

    def deg(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def lc(self):
        return self.c[-1]

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        return UPoly([_get(self.c, k) + _get(o.c, k) for k in range(n)], self.var)

    def __neg__(self):
        return UPoly([-a for a in self.c], self.var)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, RationalFunction):
            return UPoly([a * o for a in self.c], self.var)
        if not self.c or not o.c:
            return UPoly([], self.var)
        out = [_zero() for _ in range(len(self.c) + len(o.c) - 1)]
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(o.c):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return UPoly(out, self.var)

    def shift(self, k):
        return UPoly([_zero()] * k + self.c, self.var)

    def divmod(self, o):
        if o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        q = [_zero() for _ in range(max(len(self.c) - len(o.c) + 1, 0))]
        r = list(self.c)
        inv = o.lc().inverse()
        while len(r) >= len(o.c) and r:
            k = len(r) - len(o.c)
            f = r[-1] * inv
            q[k] = f
            for j, b in enumerate(o.c):
                r[j + k] = r[j + k] - f * b
            r.pop()
            while r and r[-1].is_zero():
                r.pop()
        return UPoly(q, self.var), UPoly(r, self.var)

    def __mod__(self, o):
        return self.divmod(o)[1]

    def exquo(self, o):
        q, r = self.divmod(o)
        if not r.is_zero():
            raise ArithmeticError("inexact division")
        return q

    def monic(self):
        if self.is_zero():
            return self
        inv = self.lc().inverse()
        return UPoly([a * inv for a in self.c], self.var)

    def diff(self):
        return UPoly([a * RationalFunction.const(XYZ, k) for k, a in enumerate(self.c)][1:], self.var)

    def is_const(self):
        return len(self.c) <= 1

    def eval_at(self, t):
        acc = _zero()
        for a in reversed(self.c):
            acc = acc * t + a
        return acc

    def to_rf(self) -> RationalFunction:
        x = RationalFunction.from_poly(Poly.gen(XYZ, XYZ[self.var]))
        return self.eval_at(x)

    def to_poly(self) -> Poly:
        """Clear denominators; the result is primitive with positive lead."""
        dens = [a.den for a in self.c if not a.is_zero()]
        D = reduce(lcm, dens) if dens else Poly.const(XYZ, 1)
        total = Poly.zero(XYZ)
        x = Poly.gen(XYZ, XYZ[self.var])
        for k, a in enumerate(self.c):
            if a.is_zero():
                continue
            total = total + (a * RationalFunction.from_poly(D)).as_poly() * x ** k
        return primitive(total)[1]


def _zero():
    return RationalFunction.const(XYZ, 0)


def _get(c, k):
    return c[k] if k < len(c) else _zero()


def upoly_gcd(a: UPoly, b: UPoly) -> UPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def gcdex(a: UPoly, b: UPoly):
    """(s, t, g) with s*a + t*b = g = monic gcd."""
    one = UPoly.const(RationalFunction.const(XYZ, 1), a.var)
    zero = UPoly([], a.var)
    r0, r1, s0, s1, t0, t1 = a, b, one, zero, zero, one
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return s0, t0, r0
    inv = r0.lc().inverse()
    return s0 * inv, t0 * inv, r0 * inv


def solve_diophantine(a: UPoly, b: UPoly, c: UPoly):
    """(s, t) with s*a + t*b = c and deg s < deg b; requires gcd(a, b) = 1."""
    s, t, g = gcdex(a, b)
    if g.deg() != 0:
        raise ArithmeticError("arguments are not coprime")
    s = (s * c) % b
    t = (c - s * a).exquo(b)
    return s, t


def resultant(a: UPoly, b: UPoly) -> RationalFunction:
    """Resultant over K by the Euclidean recurrence."""
    if a.is_zero() or b.is_zero():
        return _zero()
    if b.deg() == 0:
        return b.lc() ** a.deg()
    if a.deg() == 0:
        return a.lc() ** b.deg()
    r = a % b
    if r.is_zero():
        return _zero()
    sign = -1 if (a.deg() * b.deg()) % 2 else 1
    f = b.lc() ** (a.deg() - r.deg())
    return resultant(b, r) * f * RationalFunction.const(XYZ, sign)


def _interpolate(points, values):
    """Lagrange interpolation over K; returns coefficient list in t."""
    n = len(points)
    coeffs = [_zero() for _ in range(n)]
    for i, (xi, yi) in enumerate(zip(points, values)):
        if yi.is_zero():
            continue
        basis = [RationalFunction.const(XYZ, 1)]
        denom = QQ(1)
        for j, xj in enumerate(points):
            if j == i:
                continue
            new = [_zero() for _ in range(len(basis) + 1)]
            for k, b in enumerate(basis):
                new[k + 1] = new[k + 1] + b
                new[k] = new[k] - b * RationalFunction.const(XYZ, xj)
            basis = new
            denom = denom * (xi - xj)
        f = yi * RationalFunction.const(XYZ, 1 / denom)
        for k, b in enumerate(basis):
            coeffs[k] = coeffs[k] + b * f
    return coeffs


# ---------------------------------------------------------------------------


def hermite_reduce(A: UPoly, D: UPoly):
    """Mack's linear Hermite reduction: A/D = g' + h with h's denominator squarefree.

    Returns (g as RationalFunction, (numerator, squarefree denominator)).
    """
    g = _zero()
    Dm = upoly_gcd(D, D.diff())
    Ds = D.exquo(Dm)
    while Dm.deg() > 0:
        Dm2 = upoly_gcd(Dm, Dm.diff())
        Dms = Dm.exquo(Dm2)
        left = -(Ds * Dm.diff()).exquo(Dm)
        B, C = solve_diophantine(left, Dms, A)
        A = C - B.diff() * Ds.exquo(Dms)
        g = g + B.to_rf() / Dm.to_rf()
        Dm = Dm2
    return g, (A, Ds)


def _constant_poly_t(coeffs):
    """Coefficients in t, all constants of K, as a list of Coefficients."""
    out = []
    for c in coeffs:
        if not c.is_constant():
            return None
        out.append(c.constant_value())
    return out


def _log_part(A: UPoly, D: UPoly):
    """Integral of A/D (D squarefree, deg A < deg D) as an Expr, or None."""
    if A.is_zero():
        return ex.ZERO
    n = D.deg()
    Dp = D.diff()
    pts = [QQ(k) for k in range(n + 1)]
    vals = [resultant(D, A - Dp * RationalFunction.const(XYZ, t)) for t in pts]
    tc = _interpolate(pts, vals)
    while tc and tc[-1].is_zero():
        tc.pop()
    if not tc:
        return None
    lead = tc[-1]
    tc = [c / lead for c in tc]
    consts = _constant_poly_t(tc)
    if consts is None:
        return None
    if not all(is_rational(c) for c in consts):
        return _log_part_param(A, D, consts)
    Rt = Poly(("t",), {(k,): to_qq(c) for k, c in enumerate(consts) if c})
    roots = rational_roots(Rt, 0) if Rt.degree() > 0 else []
    parts = []
    rest = D
    for c in roots:
        S = upoly_gcd(D, A - Dp * RationalFunction.const(XYZ, c))
        if S.deg() <= 0:
            continue
        parts.append(ex.const_mul(c, ex.log(S.to_poly())))
        rest = rest.exquo(S)
    if rest.deg() <= 0:
        return ex.add(*parts)
    if rest.deg() != 2:
        return None
    # partial fraction numerator belonging to the remaining factor
    other = D.exquo(rest)
    inv, _, g = gcdex(other, rest)
    A2 = (A * inv) % rest
    quad = _quadratic_part(A2, rest)
    if quad is None:
        return None
    return ex.add(*parts, quad)


def _log_part_param(A, D, consts):
    """Residues in Q(params): only degree 1 and 2 resolvents handled."""
    Dp = D.diff()
    # squarefree part of the resolvent over Q(params)
    tvar = 0
    coeffs = [RationalFunction.const(XYZ, c) for c in consts]
    R = UPoly(coeffs, tvar)
    Rs = R.exquo(upoly_gcd(R, R.diff())) if R.deg() > 1 else R
    Rs = Rs.monic()
    roots = []
    if Rs.deg() == 1:
        roots = [(-Rs.c[0]).constant_value()]
    elif Rs.deg() == 2:
        b, c = Rs.c[1].constant_value(), Rs.c[0].constant_value()
        disc = b * b - 4 * c
        r = coeff_sqrt(disc)
        if r is None:
            return None
        roots = [(-b + r) / 2, (-b - r) / 2]
    else:
        return None
    parts = []
    rest = D
    for c in roots:
        S = upoly_gcd(D, A - Dp * RationalFunction.const(XYZ, c))
        if S.deg() <= 0:
            continue
        parts.append(ex.const_mul(c, ex.log(S.to_poly())))
        rest = rest.exquo(S)
    if rest.deg() > 0:
        return None
    return ex.add(*parts)


def _quadratic_part(N: UPoly, D: UPoly):
    """Integral of (p x + s)/(a x^2 + b x + c) with constant log/arctan coefficients."""
    a, b, c = D.c[2], D.c[1], D.c[0]
    p = _get(N.c, 1)
    s = _get(N.c, 0)
    two = RationalFunction.const(XYZ, 2)
    four = RationalFunction.const(XYZ, 4)
    lncoef = p / (two * a)
    k = s - p * b / (two * a)
    parts = []
    if not lncoef.is_zero():
        parts.append(ex.mul(ex.rat(lncoef), ex.log(D.to_poly())))
    if k.is_zero():
        return ex.add(*parts)
    delta = four * a * c - b * b
    kappa2 = four * k * k / delta
    if not kappa2.is_constant():
        return None
    q = kappa2.constant_value()
    x = RationalFunction.from_poly(Poly.gen(XYZ, XYZ[D.var]))
    lin = two * a * x + b
    if not is_rational(q):
        r = coeff_sqrt(q)
        if r is None:
            return None
        w = lin * RationalFunction.const(XYZ, r) / (two * k)
        parts.append(ex.const_mul(r, ex.atan(w)))
        return ex.add(*parts)
    q = to_qq(q)
    if q <= 0:
        return None
    rq = rational_sqrt(q)
    if rq is not None:
        w = lin * RationalFunction.const(XYZ, rq) / (two * k)
        parts.append(ex.const_mul(rq, ex.atan(w)))
        return ex.add(*parts)
    n, d = _split_square(q)
    # kappa = n*sqrt(d); the arctan argument is sqrt(d) * n*(2ax+b)/(2k)
    w = lin * RationalFunction.const(XYZ, n) / (two * k)
    parts.append(ex.mul(ex.rat(n), ex.Pow(ex.rat(d), QQ(1, 2)), ex.atan(w, d)))
    return ex.add(*parts)


def _split_square(q):
    """q = n^2 * d with d a squarefree integer and n rational."""
    num, den = int(q.numerator), int(q.denominator)
    # move the denominator into the numerator: q = (num*den)/den^2
    m = num * den
    n = 1
    d = 1
    k = 2
    while k * k <= m:
        while m % (k * k) == 0:
            n *= k
            m //= k * k
        k += 1
    d = m
    return QQ(n, den), d


def integrate_rational(f: RationalFunction, var: int):
    """Antiderivative of f in generator ``var`` as an Expr, or None.

    The other generators are constants of integration, but logarithm and
    arctangent coefficients must be true numbers (or parameter constants):
    a residue such as 1/y would leave a logarithm that the next nested
    integration step cannot absorb, so such integrands give None.
    """
    if f.is_zero():
        return ex.ZERO
    den_c = f.den.coeffs_in(var)
    if max(den_c) == 0:
        # polynomial in var over K
        num = UPoly.from_poly(f.num, var, scale=RationalFunction.from_poly(f.den))
        return ex.rat(_integrate_poly(num))
    num = UPoly.from_poly(f.num, var)
    den = UPoly.from_poly(f.den, var)
    q, r = num.divmod(den)
    total = _integrate_poly(q)
    g, (A, Ds) = hermite_reduce(r, den)
    total = total + g
    q2, A = A.divmod(Ds)
    total = total + _integrate_poly(q2)
    logs = _log_part(A, Ds) if not A.is_zero() else ex.ZERO
    if logs is None:
        return None
    return ex.add(ex.rat(total), logs)


def _integrate_poly(p: UPoly) -> RationalFunction:
    out = [_zero()] + [a * RationalFunction.const(XYZ, QQ(1, k + 1)) for k, a in enumerate(p.c)]
    return UPoly(out, p.var).to_rf()
