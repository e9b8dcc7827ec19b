"""Exact sparse multivariate polynomials and rational functions.

A :class:`Poly` is a map from exponent tuples to nonzero coefficients over a
tuple of generator names.  Coefficients are exact rationals (``mpq``) or, when
symbolic parameters are declared, :class:`ParamCoeff` values: reduced ratios
of integer polynomials in the parameters.  A parameter-free coefficient is
always stored as a rational, never as a constant ``ParamCoeff``.

The default monomial order is graded reverse lexicographic with the generators
ordered as given (``x > y > y'`` for the ODE ring).
"""

from __future__ import annotations

import numbers
import operator
from fractions import Fraction
from functools import reduce
from math import gcd as igcd, lcm as ilcm

try:
    from gmpy2 import mpq as _mpq

    def QQ(num, den=1):
        return _mpq(num, den)

    _RATIONAL_TYPES = (int, type(_mpq(0)), Fraction)
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    def QQ(num, den=1):
        return Fraction(num, den)

    _RATIONAL_TYPES = (int, Fraction)

XYZ = ("x", "y", "y'")
X, Y, Z = 0, 1, 2


class Indivisible(ArithmeticError):
    """Raised by :func:`divide_exact` when the quotient is not a polynomial."""


def is_rational(c) -> bool:
    return isinstance(c, _RATIONAL_TYPES) and not isinstance(c, bool)


def to_qq(c):
    if isinstance(c, numbers.Rational):
        return QQ(c.numerator, c.denominator)
    raise TypeError(f"not a rational number: {c!r}")


def grevlex_key(e):
    """Sort key: larger key means larger monomial in degrevlex."""
    return (sum(e), tuple(-k for k in reversed(e)))


def _mono_str(gens, e):
    parts = []
    for name, k in zip(gens, e):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


_add = operator.add
_FIELD = 24
_MASK = (1 << _FIELD) - 1


def _pack(e):
    k = 0
    for i, x in enumerate(e):
        if x:
            k |= x << (_FIELD * i)
    return k


def _unpack(k, n):
    out = [0] * n
    i = 0
    while k:
        out[i] = k & _MASK
        k >>= _FIELD
        i += 1
    return tuple(out)


class Poly:
    """Immutable sparse polynomial.

    ``terms`` maps exponent tuples (one entry per generator) to nonzero
    coefficients.  Treat instances as values; never mutate ``terms``.
    """

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, gens, terms=None):
        self.gens = tuple(gens)
        if terms:
            self.terms = {e: c for e, c in terms.items() if c}
        else:
            self.terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, gens, terms):
        p = object.__new__(cls)
        p.gens = gens
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, gens):
        return cls._raw(tuple(gens), {})

    @classmethod
    def const(cls, gens, c):
        gens = tuple(gens)
        c = _coerce_coeff(c)
        if not c:
            return cls._raw(gens, {})
        return cls._raw(gens, {(0,) * len(gens): c})

    @classmethod
    def gen(cls, gens, name):
        gens = tuple(gens)
        i = gens.index(name)
        e = [0] * len(gens)
        e[i] = 1
        return cls._raw(gens, {tuple(e): QQ(1)})

    @classmethod
    def monomial(cls, gens, e, c=1):
        c = _coerce_coeff(c)
        if not c:
            return cls._raw(tuple(gens), {})
        return cls._raw(tuple(gens), {tuple(e): c})

    # -- basic queries ----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def constant_value(self):
        """Coefficient of the constant monomial (0 if absent)."""
        return self.terms.get((0,) * len(self.gens), QQ(0))

    def is_monomial(self):
        return len(self.terms) == 1

    def __len__(self):
        return len(self.terms)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i):
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables(self):
        """Indices of generators that actually occur."""
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return sorted(used)

    def free_names(self):
        return [self.gens[i] for i in self.variables()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def leading_coeff(self):
        return self.leading_term()[1] if self.terms else QQ(0)

    def coeff(self, e):
        return self.terms.get(tuple(e), QQ(0))

    def is_rational_coeffs(self):
        return all(is_rational(c) for c in self.terms.values())

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            if other.gens != self.gens:
                raise ValueError(f"generator mismatch: {self.gens} vs {other.gens}")
            return other
        return Poly.const(self.gens, other)

    def __add__(self, other):
        other = self._lift(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(self.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._lift(other)
        if not self.terms or not other.terms:
            return Poly._raw(self.gens, {})
        if len(self.terms) * len(other.terms) < 8:
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(map(_add, e1, e2))
                    v = out.get(e)
                    out[e] = c1 * c2 if v is None else v + c1 * c2
            return Poly._raw(self.gens, {e: c for e, c in out.items() if c})
        # exponent vectors packed into integers, so one addition adds vectors
        n = len(self.gens)
        a = [(_pack(e), c) for e, c in self.terms.items()]
        b = [(_pack(e), c) for e, c in other.terms.items()]
        out = {}
        get = out.get
        for k1, c1 in a:
            for k2, c2 in b:
                k = k1 + k2
                v = get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw(self.gens, {_unpack(k, n): c for k, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = _coerce_coeff(c)
        if not c:
            return Poly._raw(self.gens, {})
        if c == 1:
            return self
        return Poly._raw(self.gens, {e: v * c for e, v in self.terms.items() if v * c})

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result = Poly.const(self.gens, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.gens == other.gens and self.terms == other.terms
        if is_rational(other) or isinstance(other, ParamCoeff):
            return self == Poly.const(self.gens, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------
    def diff(self, i):
        if isinstance(i, str):
            i = self.gens.index(i)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.gens, out)

    def coeffs_in(self, i):
        """Split into {power of generator i: coefficient Poly (free of i)}."""
        parts = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            parts.setdefault(k, {})[ne] = c
        return {k: Poly._raw(self.gens, t) for k, t in parts.items()}

    def lc_in(self, i):
        parts = self.coeffs_in(i)
        return parts[max(parts)]

    def subs(self, i, value):
        """Substitute generator ``i`` by a Poly (same gens) or a scalar."""
        if isinstance(i, str):
            i = self.gens.index(i)
        if not isinstance(value, Poly):
            value = Poly.const(self.gens, value)
        parts = self.coeffs_in(i)
        if list(parts) == [0]:
            return self
        result = Poly.zero(self.gens)
        powers = {0: Poly.const(self.gens, 1)}
        for k in sorted(parts):
            if k not in powers:
                top = max(powers)
                p = powers[top]
                for j in range(top + 1, k + 1):
                    p = p * value
                    powers[j] = p
            result = result + parts[k] * powers[k]
        return result

    def subs_many(self, mapping):
        """Simultaneous substitution ``{gen index or name: value}``."""
        idx = {}
        for k, v in mapping.items():
            idx[self.gens.index(k) if isinstance(k, str) else k] = v
        if not idx:
            return self
        vals = {i: (v if isinstance(v, Poly) else Poly.const(self.gens, v)) for i, v in idx.items()}
        cache = {}

        def pw(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = vals[i] ** k
            return cache[key]

        n = len(self.gens)
        out = {}
        for e, c in self.terms.items():
            rest = list(e)
            term = None
            for i in vals:
                if e[i]:
                    f = pw(i, e[i])
                    term = f if term is None else term * f
                    rest[i] = 0
            k0 = _pack(rest)
            if term is None:
                out[k0] = out.get(k0, 0) + c
                continue
            for e2, c2 in term.terms.items():
                k = k0 + _pack(e2)
                out[k] = out.get(k, 0) + c * c2
        return Poly._raw(self.gens, {_unpack(k, n): c for k, c in out.items() if c})

    def map_coeffs(self, f):
        out = {}
        for e, c in self.terms.items():
            v = f(c)
            if v:
                out[e] = v
        return Poly._raw(self.gens, out)

    def with_gens(self, gens):
        """Re-embed into a superset (or reordering) of generators."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        pos = [gens.index(g) for g in self.gens]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(gens)
            for j, k in zip(pos, e):
                ne[j] = k
            out[tuple(ne)] = c
        return Poly._raw(gens, out)

    def drop_to(self, gens):
        """Restrict to ``gens``; every used generator must be kept."""
        gens = tuple(gens)
        pos = [self.gens.index(g) for g in gens]
        used = set(self.variables())
        if not used <= set(pos):
            raise ValueError("polynomial uses generators outside the target set")
        out = {tuple(e[j] for j in pos): c for e, c in self.terms.items()}
        return Poly._raw(gens, out)

    def evaluate(self, point):
        """Evaluate at a full point (sequence of scalars aligned with gens)."""
        total = QQ(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(point, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    # -- printing -----------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, gens={self.gens})"


def _coerce_coeff(c):
    if isinstance(c, ParamCoeff):
        return c
    if isinstance(c, Poly):
        raise TypeError("a Poly is not a coefficient; use Poly arithmetic")
    return to_qq(c)


# ---------------------------------------------------------------------------
# exact division and gcd


def divide_exact(p: Poly, q: Poly) -> Poly:
    """Return r with p == q*r, or raise :class:`Indivisible`."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return Poly.zero(p.gens)
    eq, cq = q.leading_term()
    if len(q.terms) == 1:
        out = {}
        for e, c in p.terms.items():
            ne = tuple(a - b for a, b in zip(e, eq))
            if min(ne) < 0:
                raise Indivisible(f"{p} is not divisible by {q}")
            out[ne] = c / cq
        return Poly._raw(p.gens, out)
    rest = Poly._raw(q.gens, {e: c for e, c in q.terms.items() if e != eq})
    r = dict(p.terms)
    quot = {}
    key = grevlex_key
    while r:
        e = max(r, key=key)
        c = r[e]
        ne = tuple(a - b for a, b in zip(e, eq))
        if min(ne) < 0:
            raise Indivisible(f"{p} is not divisible by {q}")
        f = c / cq
        quot[ne] = f
        del r[e]
        for e2, c2 in rest.terms.items():
            me = tuple(a + b for a, b in zip(ne, e2))
            v = r.get(me)
            w = -f * c2 if v is None else v - f * c2
            if w:
                r[me] = w
            elif v is not None:
                del r[me]
    return Poly._raw(p.gens, quot)


def divides(q: Poly, p: Poly) -> bool:
    try:
        divide_exact(p, q)
    except Indivisible:
        return False
    return True


def _prem(a: Poly, b: Poly, i: int) -> Poly:
    """Pseudo-remainder of a by b as polynomials in generator i."""
    db = b.degree_in(i)
    lb = b.lc_in(i)
    r = a
    while r and r.degree_in(i) >= db:
        dr = r.degree_in(i)
        lr = r.lc_in(i)
        e = [0] * len(a.gens)
        e[i] = dr - db
        r = r * lb - lr * Poly.monomial(a.gens, e) * b
    return r


def content_in(p: Poly, i: int) -> Poly:
    """gcd of the coefficients of p viewed as a polynomial in generator i."""
    parts = sorted(p.coeffs_in(i).values(), key=len)
    g = parts[0]
    for c in parts[1:]:
        if g.is_constant():
            break
        g = _gcd(g, c)
    if g.is_constant():
        return Poly.const(p.gens, 1)
    return g


def _monomial_gcd(p: Poly, q: Poly) -> Poly:
    exps = list(p.terms) + list(q.terms)
    e = tuple(min(col) for col in zip(*exps))
    return Poly.monomial(p.gens, e, 1)


def _gcd(f: Poly, g: Poly) -> Poly:
    if f.is_zero():
        return normalize(g)
    if g.is_zero():
        return normalize(f)
    if f.is_constant() or g.is_constant():
        return Poly.const(f.gens, 1)
    if f.is_monomial() or g.is_monomial():
        m = f if f.is_monomial() else g
        other = g if m is f else f
        e0 = next(iter(m.terms))
        cols = zip(e0, *other.terms.keys())
        return Poly.monomial(f.gens, tuple(min(c) for c in cols), 1)
    vf, vg = set(f.variables()), set(g.variables())
    common = vf & vg
    if not common:
        return Poly.const(f.gens, 1)
    if f.is_rational_coeffs() and g.is_rational_coeffs():
        h = _heuristic_gcd(f, g)
        if h is not None:
            return h
    # A variable present in only one argument: the gcd divides that
    # argument's content with respect to it.
    if vf - vg:
        return _gcd(content_in(f, min(vf - vg)), g)
    if vg - vf:
        return _gcd(f, content_in(g, min(vg - vf)))
    i = min(common, key=lambda k: (max(f.degree_in(k), g.degree_in(k)), k))
    cf, cg = content_in(f, i), content_in(g, i)
    c = _gcd(cf, cg)
    a = divide_exact(f, cf) if not cf.is_constant() else f
    b = divide_exact(g, cg) if not cg.is_constant() else g
    if a.degree_in(i) < b.degree_in(i):
        a, b = b, a
    while b:
        r = _prem(a, b, i)
        a = b
        if r.is_zero():
            break
        if r.degree_in(i) == 0:
            a = Poly.const(f.gens, 1)
            break
        b = divide_exact(r, content_in(r, i))
        b = primitive(b)[1]
    h = a
    if h.degree_in(i) > 0:
        h = divide_exact(h, content_in(h, i))
    else:
        h = Poly.const(f.gens, 1)
    return normalize(c * h)


def _integer_primitive(p: Poly):
    """p scaled to coprime integer coefficients, and the integer content."""
    dens = reduce(ilcm, (int(c.denominator) for c in p.terms.values()), 1)
    nums = {e: int(c * dens) for e, c in p.terms.items()}
    g = reduce(igcd, nums.values(), 0)
    return {e: v // g for e, v in nums.items()}, g


def _ipoly(gens, terms):
    return Poly._raw(gens, {e: QQ(v) for e, v in terms.items() if v})


def _heu(A: dict, B: dict, gens):
    """Heuristic gcd of integer polynomials given as {exponent: int}.

    One variable is evaluated at a large integer xi, the images' gcd is
    computed recursively and lifted back by a symmetric xi-adic expansion;
    the candidate is accepted only if it divides both inputs.
    """
    vs = sorted({i for e in list(A) + list(B) for i, k in enumerate(e) if k})
    zero = (0,) * len(gens)
    if not vs:
        return {zero: igcd(A.get(zero, 0), B.get(zero, 0))}
    # integer contents are split off at every level and their gcd restored
    cA = reduce(igcd, A.values(), 0)
    cB = reduce(igcd, B.values(), 0)
    if cA != 1 or cB != 1:
        A = {e: v // cA for e, v in A.items()}
        B = {e: v // cB for e, v in B.items()}
        G = _heu(A, B, gens)
        if G is None:
            return None
        k = igcd(cA, cB)
        return {e: v * k for e, v in G.items()}
    i = vs[-1]
    dA = max(e[i] for e in A)
    dB = max(e[i] for e in B)
    xi = 2 * min(max(map(abs, A.values())), max(map(abs, B.values()))) + 29
    pA, pB = _ipoly(gens, A), _ipoly(gens, B)
    for _ in range(6):
        if xi.bit_length() * max(dA, dB) > 6000:
            return None
        a = _eval_int(A, i, xi)
        b = _eval_int(B, i, xi)
        if a and b:
            g = _heu(a, b, gens)
            if g is not None:
                G = {}
                for e, c in g.items():
                    k = 0
                    while c:
                        r = c % xi
                        if r > xi // 2:
                            r -= xi
                        if r:
                            ne = e[:i] + (k,) + e[i + 1:]
                            G[ne] = G.get(ne, 0) + r
                        c = (c - r) // xi
                        k += 1
                G = {e: v for e, v in G.items() if v}
                if G:
                    cont = reduce(igcd, G.values(), 0)
                    G = {e: v // cont for e, v in G.items()}
                    pG = _ipoly(gens, G)
                    if divides(pG, pA) and divides(pG, pB):
                        return G
        xi = xi * 73794 // 27011
    return None


def _eval_int(A: dict, i: int, xi: int) -> dict:
    out = {}
    for e, c in A.items():
        ne = e[:i] + (0,) + e[i + 1:]
        out[ne] = out.get(ne, 0) + c * xi ** e[i]
    return {e: v for e, v in out.items() if v}


def _heuristic_gcd(f: Poly, g: Poly):
    A, _ = _integer_primitive(f)
    B, _ = _integer_primitive(g)
    G = _heu(A, B, f.gens)
    if G is None:
        return None
    return normalize(_ipoly(f.gens, G))


def gcd(p: Poly, q: Poly) -> Poly:
    """Normalized greatest common divisor (gcd(0, 0) is 0)."""
    if p.gens != q.gens:
        raise ValueError("generator mismatch")
    if p.is_zero() and q.is_zero():
        return p
    return _gcd(p, q)


def lcm(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly.zero(p.gens)
    return normalize(divide_exact(p * q, gcd(p, q)))


def primitive(p: Poly):
    """Split p = content * prim with prim having canonical leading coefficient.

    Over the rationals prim has coprime integer coefficients and a positive
    leading coefficient; over Q(params) its coefficients are additionally
    integer polynomials in the parameters with trivial common content.
    """
    if p.is_zero():
        return QQ(0), p
    coeffs = list(p.terms.values())
    if all(is_rational(c) for c in coeffs):
        dens = reduce(ilcm, (int(c.denominator) for c in coeffs), 1)
        nums = [int(c * dens) for c in coeffs]
        g = reduce(igcd, nums, 0)
        cont = QQ(g, dens)
        if p.leading_coeff() < 0:
            cont = -cont
        if cont == 1:
            return cont, p
        inv = 1 / cont
        return cont, Poly._raw(p.gens, {e: c * inv for e, c in p.terms.items()})
    # Q(params): clear parameter denominators, remove parameter content.
    pgens = _param_gens(coeffs)
    nums, dens = [], []
    for c in coeffs:
        if isinstance(c, ParamCoeff):
            nums.append(c.num.with_gens(pgens))
            dens.append(c.den.with_gens(pgens))
        else:
            nums.append(Poly.const(pgens, c))
            dens.append(Poly.const(pgens, 1))
    D = reduce(lcm, dens)
    scaled = [divide_exact(D, d) * n for n, d in zip(nums, dens)]
    G = reduce(_gcd, scaled)
    prim_coeffs = [divide_exact(s, G) for s in scaled]
    # integer-primitive with positive leading numeric coefficient
    allq = [c for pc in prim_coeffs for c in pc.terms.values()]
    dd = reduce(ilcm, (int(c.denominator) for c in allq), 1)
    gg = reduce(igcd, (int(c * dd) for c in allq), 0)
    k = QQ(dd, gg)
    lead_index = max(range(len(coeffs)), key=lambda j: grevlex_key(list(p.terms)[j]))
    lead = prim_coeffs[lead_index]
    if lead.leading_coeff() < 0:
        k = -k
    prim_coeffs = [pc.scale(k) for pc in prim_coeffs]
    cont = make_coeff(G.scale(1 / k), D)
    terms = {e: make_coeff(pc, Poly.const(pgens, 1)) for e, pc in zip(p.terms, prim_coeffs)}
    return cont, Poly._raw(p.gens, terms)


def normalize(p: Poly) -> Poly:
    return primitive(p)[1]


def squarefree_part(p: Poly) -> Poly:
    """Product of the distinct irreducible factors of p (normalized)."""
    if p.is_zero():
        raise ValueError("squarefree part of zero")
    if p.is_constant():
        return Poly.const(p.gens, 1)
    vs = p.variables()
    i = vs[0]
    c = content_in(p, i)
    pp = divide_exact(p, c) if not c.is_constant() else p
    g = _gcd(pp, pp.diff(i))
    core = divide_exact(pp, g) if not g.is_constant() else pp
    rest = squarefree_part(c) if not c.is_constant() else Poly.const(p.gens, 1)
    return normalize(core * rest)


def squarefree_decomposition(p: Poly, i: int):
    """Yun's algorithm in generator i: returns [(factor, multiplicity)].

    Factors are primitive in i; the content in i is not decomposed and is
    returned separately as the first element of the pair (content, factors).
    """
    c = content_in(p, i)
    a = divide_exact(p, c) if not c.is_constant() else p
    out = []
    b = a.diff(i)
    g = _gcd(a, b)
    if g.is_constant():
        return c, [(normalize(a), 1)]
    w = divide_exact(a, g)
    y = divide_exact(b, g)
    k = 1
    z = y - w.diff(i)
    while not w.is_constant():
        h = _gcd(w, z)
        if not h.is_constant():
            out.append((h, k))
        w = divide_exact(w, h)
        y = divide_exact(z, h)
        z = y - w.diff(i)
        k += 1
    return c, out


def _param_gens(coeffs):
    gens = ()
    for c in coeffs:
        if isinstance(c, ParamCoeff):
            if not gens:
                gens = c.num.gens
            elif c.num.gens != gens:
                gens = gens + tuple(g for g in c.num.gens if g not in gens)
    return gens


def rational_sqrt(c):
    """Exact square root of a nonnegative rational, or None."""
    from math import isqrt

    c = to_qq(c)
    if c < 0:
        return None
    n, d = int(c.numerator), int(c.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return QQ(rn, rd)
    return None


def coeff_sqrt(c):
    """Exact square root of a Coefficient, or None (sign chosen canonically)."""
    if is_rational(c):
        return rational_sqrt(c)
    rn = poly_sqrt(c.num)
    rd = poly_sqrt(c.den)
    if rn is None or rd is None:
        return None
    return make_coeff(rn, rd)


def poly_sqrt(p: Poly):
    """Exact square root of a polynomial (positive leading coefficient), or None."""
    if p.is_zero():
        return p
    e, c = p.leading_term()
    if any(k % 2 for k in e):
        return None
    rc = coeff_sqrt(c)
    if rc is None:
        return None
    half = tuple(k // 2 for k in e)
    root = Poly.monomial(p.gens, half, rc)
    rem = p - root * root
    two_lead = rc * 2
    for _ in range(len(p) * len(p) + 8):
        if not rem:
            return root
        er, cr = rem.leading_term()
        te = tuple(a - b for a, b in zip(er, half))
        if min(te) < 0 or grevlex_key(te) >= grevlex_key(half):
            return None
        t = Poly.monomial(p.gens, te, cr / two_lead)
        rem = rem - (root.scale(2) + t) * t
        root = root + t
    return None


# ---------------------------------------------------------------------------
# parametric coefficients


class ParamCoeff:
    """A nonconstant element of Q(params): reduced ratio num/den.

    Instances are produced by :func:`make_coeff`, which demotes constant
    values to plain rationals so that equality stays canonical.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly):
        self.num = num
        self.den = den
        self._hash = None

    @property
    def gens(self):
        return self.num.gens

    def _as_pair(self, other):
        if isinstance(other, ParamCoeff):
            if other.num.gens != self.num.gens:
                gens = self.num.gens + tuple(g for g in other.num.gens if g not in self.num.gens)
                return (self.num.with_gens(gens), self.den.with_gens(gens),
                        other.num.with_gens(gens), other.den.with_gens(gens))
            return self.num, self.den, other.num, other.den
        if is_rational(other):
            g = self.num.gens
            return self.num, self.den, Poly.const(g, other), Poly.const(g, 1)
        return None

    def __add__(self, other):
        t = self._as_pair(other)
        if t is None:
            return NotImplemented
        a, b, c, d = t
        if b == d:
            return make_coeff(a + c, b)
        return make_coeff(a * d + c * b, b * d)

    __radd__ = __add__

    def __neg__(self):
        return ParamCoeff(-self.num, self.den)

    def __sub__(self, other):
        t = self._as_pair(other)
        if t is None:
            return NotImplemented
        a, b, c, d = t
        if b == d:
            return make_coeff(a - c, b)
        return make_coeff(a * d - c * b, b * d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_rational(other):
            if not other:
                return QQ(0)
            return ParamCoeff(self.num.scale(other), self.den)
        t = self._as_pair(other)
        if t is None:
            return NotImplemented
        a, b, c, d = t
        return make_coeff(a * c, b * d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_rational(other):
            if not other:
                raise ZeroDivisionError("coefficient division by zero")
            return ParamCoeff(self.num.scale(1 / to_qq(other)), self.den)
        t = self._as_pair(other)
        if t is None:
            return NotImplemented
        a, b, c, d = t
        return make_coeff(a * d, b * c)

    def __rtruediv__(self, other):
        return make_coeff(self.den.scale(to_qq(other)), self.num)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return QQ(1)
        if k > 0:
            return ParamCoeff(self.num ** k, self.den ** k)
        return make_coeff(self.den ** (-k), self.num ** (-k))

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, ParamCoeff):
            t = self._as_pair(other)
            return t[0] == t[2] and t[1] == t[3]
        return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __lt__(self, other):
        raise TypeError("parametric coefficients are not ordered")

    def __gt__(self, other):
        raise TypeError("parametric coefficients are not ordered")

    def is_polynomial(self):
        return self.den.is_constant()

    def subs(self, mapping):
        """Substitute parameters {name: Coefficient}; returns a Coefficient."""
        return eval_param_fraction(self.num, self.den, mapping)

    def __str__(self):
        if self.den.is_constant():
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    __repr__ = __str__


def make_coeff(num: Poly, den: Poly):
    """Build the canonical coefficient num/den (rational if parameter-free)."""
    if den.is_zero():
        raise ZeroDivisionError("parametric coefficient with zero denominator")
    if num.is_zero():
        return QQ(0)
    if den.is_constant():
        d = den.constant_value()
        if num.is_constant():
            return num.constant_value() / d
        return ParamCoeff(num.scale(1 / d) if d != 1 else num, Poly.const(num.gens, 1))
    g = _gcd(num, den)
    if not g.is_constant():
        num = divide_exact(num, g)
        den = divide_exact(den, g)
    k, den = primitive(den)
    if den.is_constant():
        num = num.scale(1 / (k * den.constant_value()))
        if num.is_constant():
            return num.constant_value()
        return ParamCoeff(num, Poly.const(num.gens, 1))
    num = num.scale(1 / k)
    return ParamCoeff(num, den)


def param_symbol(gens, name):
    """The coefficient value of parameter ``name`` inside Q(gens)."""
    return ParamCoeff(Poly.gen(gens, name), Poly.const(gens, 1))


def coeff_as_fraction(c, pgens):
    """Return (num, den) Polys over Q in ``pgens`` for a coefficient."""
    if isinstance(c, ParamCoeff):
        return c.num.with_gens(pgens), c.den.with_gens(pgens)
    return Poly.const(pgens, c), Poly.const(pgens, 1)


def eval_param_fraction(num: Poly, den: Poly, mapping):
    """Evaluate num/den (polys in parameters) with parameters substituted."""
    top = _eval_param_poly(num, mapping)
    bot = _eval_param_poly(den, mapping)
    if not bot:
        raise ZeroDivisionError("parameter binding makes a denominator vanish")
    return top / bot


def _eval_param_poly(p: Poly, mapping):
    total = QQ(0)
    for e, c in p.terms.items():
        t = c
        for name, k in zip(p.gens, e):
            if k:
                if name in mapping:
                    t = t * mapping[name] ** k
                else:
                    t = t * param_symbol(p.gens, name) ** k
        total = total + t
    return total


def subs_coeff(c, mapping):
    if isinstance(c, ParamCoeff):
        return c.subs(mapping)
    return c


def substitute_params(p: Poly, bindings) -> Poly:
    """Substitute parameter values (Coefficients) into every coefficient."""
    if not bindings:
        return p
    return p.map_coeffs(lambda c: subs_coeff(c, bindings))


def coeff_params(c):
    """Names of the parameters a coefficient actually depends on."""
    if isinstance(c, ParamCoeff):
        return set(c.num.free_names()) | set(c.den.free_names())
    return set()


def poly_params(p: Poly):
    used = set()
    for c in p.terms.values():
        used |= coeff_params(c)
    return used


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Reduced ratio of two polynomials over the same generators."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, *, reduced=False):
        if den is None:
            den = Poly.const(num.gens, 1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            num, den = _reduce_fraction(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def gens(self):
        return self.num.gens

    @classmethod
    def const(cls, gens, c):
        return cls(Poly.const(gens, c), reduced=True)

    @classmethod
    def from_poly(cls, p):
        return cls(p, Poly.const(p.gens, 1), reduced=True)

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction.from_poly(other)
        return RationalFunction.const(self.gens, other)

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return self.num.constant_value() / self.den.constant_value()

    def as_poly(self):
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def __add__(self, other):
        o = self._lift(other)
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        if self.den.is_constant() and o.den.is_constant():
            d = self.den.constant_value()
            e = o.den.constant_value()
            return RationalFunction(self.num.scale(1 / d) + o.num.scale(1 / e), reduced=True)
        g = gcd(self.den, o.den)
        if g.is_constant():
            return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)
        d1 = divide_exact(self.den, g)
        d2 = divide_exact(o.den, g)
        return RationalFunction(self.num * d2 + o.num * d1, d1 * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction.const(self.gens, 0)
        if o.is_constant():
            return RationalFunction(self.num.scale(o.constant_value()), self.den, reduced=True)
        if self.is_constant():
            return RationalFunction(o.num.scale(self.constant_value()), o.den, reduced=True)
        g1 = gcd(self.num, o.den)
        g2 = gcd(o.num, self.den)
        a = divide_exact(self.num, g1) if not g1.is_constant() else self.num
        d = divide_exact(o.den, g1) if not g1.is_constant() else o.den
        c = divide_exact(o.num, g2) if not g2.is_constant() else o.num
        b = divide_exact(self.den, g2) if not g2.is_constant() else self.den
        return RationalFunction(a * c, b * d, reduced=True)._canon()

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num, reduced=True)._canon()

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ValueError("integer exponent required")
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k, reduced=True)._canon()

    def _canon(self):
        k, d = primitive(self.den)
        if k == 1:
            return self
        return RationalFunction(self.num.scale(1 / k), d, reduced=True)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Poly):
            return self == RationalFunction.from_poly(other)
        if is_rational(other) or isinstance(other, ParamCoeff):
            return self.den.is_constant() and self.num == Poly.const(self.gens, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def diff(self, i):
        if self.den.is_constant():
            return RationalFunction(self.num.diff(i), self.den, reduced=True)
        return RationalFunction(self.num.diff(i) * self.den - self.num * self.den.diff(i), self.den * self.den)

    def subs(self, i, value):
        if isinstance(value, RationalFunction):
            gens = self.gens
            idx = gens.index(i) if isinstance(i, str) else i
            return _subs_rational(self.num, idx, value) / _subs_rational(self.den, idx, value)
        return RationalFunction(self.num.subs(i, value), self.den.subs(i, value))

    def map_coeffs(self, f):
        return RationalFunction(self.num.map_coeffs(f), self.den.map_coeffs(f))

    def variables(self):
        return sorted(set(self.num.variables()) | set(self.den.variables()))

    def __str__(self):
        if self.den.is_constant():
            return format_poly(self.num.scale(1 / self.den.constant_value()))
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _subs_rational(p: Poly, i: int, value: RationalFunction) -> RationalFunction:
    parts = p.coeffs_in(i)
    total = RationalFunction.const(p.gens, 0)
    for k, c in parts.items():
        total = total + RationalFunction.from_poly(c) * value ** k
    return total


def _reduce_fraction(num: Poly, den: Poly):
    if num.is_zero():
        return Poly.zero(num.gens), Poly.const(num.gens, 1)
    if den.is_constant():
        d = den.constant_value()
        return (num.scale(1 / d) if d != 1 else num), Poly.const(num.gens, 1)
    g = gcd(num, den)
    if not g.is_constant():
        num = divide_exact(num, g)
        den = divide_exact(den, g)
    k, den = primitive(den)
    if den.is_constant():
        return num.scale(1 / (k * den.constant_value())), Poly.const(num.gens, 1)
    return num.scale(1 / k), den


# ---------------------------------------------------------------------------
# formatting


def _coeff_terms(c):
    """Expand a coefficient into (numeric, param-monomial-string) pairs.

    Returns None when the coefficient has a nontrivial parameter denominator.
    """
    if is_rational(c):
        return [(to_qq(c), "")]
    if c.den.is_constant():
        d = c.den.constant_value()
        return [(v / d, _mono_str(c.num.gens, e)) for e, v in c.num.sorted_terms()]
    return None


def format_coeff(c) -> str:
    if is_rational(c):
        return str(to_qq(c))
    return str(c)


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for e, c in p.sorted_terms():
        mono = _mono_str(p.gens, e)
        expanded = _coeff_terms(c)
        if expanded is None:
            pieces.append((1, f"({c.num})/({c.den})" + (f"*{mono}" if mono else "")))
            continue
        for v, pm in expanded:
            body = "*".join(s for s in (pm, mono) if s)
            sign = -1 if v < 0 else 1
            a = abs(v)
            if not body:
                pieces.append((sign, str(a)))
            elif a == 1:
                pieces.append((sign, body))
            else:
                pieces.append((sign, f"{a}*{body}"))
    out = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
    for sign, s in pieces[1:]:
        out += (" - " if sign < 0 else " + ") + s
    return out


def xyz_poly(terms=None) -> Poly:
    return Poly(XYZ, terms)


def xyz_gen(i) -> Poly:
    return Poly.gen(XYZ, XYZ[i])


# ---------------------------------------------------------------------------
# coprime refinement


def squarefree_pieces(v: Poly):
    """Distinct squarefree, normalized pieces whose product has v's radical."""
    for i in v.variables():
        content, parts = squarefree_decomposition(v, i)
        pieces = [f for f, _ in parts if not f.is_constant()]
        if not content.is_constant():
            pieces = squarefree_pieces(content) + pieces
        return [normalize(f) for f in pieces] if pieces else [normalize(v)]
    return [normalize(v)]


def coprime_basis(polys):
    """Pairwise coprime squarefree normalized polynomials generating ``polys``.

    Every input (up to a constant) is a product of powers of the returned
    pieces.  Inputs that are constant are ignored.
    """
    atoms = []
    work = [p for p in polys if not p.is_constant()]
    while work:
        v = work.pop(0)
        if v.is_constant():
            continue
        pieces = squarefree_pieces(v)
        if len(pieces) > 1 or pieces[0] != normalize(v):
            work = pieces + work
            continue
        v = pieces[0]
        for k, a in enumerate(atoms):
            if a == v:
                break
            h = gcd(a, v)
            if not h.is_constant():
                atoms.pop(k)
                work = [w for w in (h, divide_exact(a, h), divide_exact(v, h))
                        if not w.is_constant()] + work
                break
        else:
            atoms.append(v)
    return atoms


def exponents_over(p: Poly, atoms):
    """Write p = unit * prod atoms[k]^e_k; returns (unit, [e_k]) or None."""
    rest = p
    exps = []
    for a in atoms:
        k = 0
        while rest.degree() >= a.degree() and not rest.is_constant():
            try:
                rest = divide_exact(rest, a)
            except Indivisible:
                break
            k += 1
        exps.append(k)
    if not rest.is_constant():
        return None
    return rest.constant_value(), exps
