"""Polynomial systems in unknown coefficients and their solution branches.

The solver is a splitting elimination: it substitutes unknowns that occur
linearly, splits on factors and on vanishing/nonvanishing of linear
coefficients, extracts rational roots of univariate equations and falls back
to a lexicographic Groebner basis when nothing else applies.  Every branch
keeps the nonvanishing conditions it assumed, and every returned branch is
re-substituted into the original equations before it is handed out.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import isqrt

from .polyring import (
    Poly,
    QQ,
    RationalFunction,
    divide_exact,
    gcd,
    is_rational,
    normalize,
    poly_sqrt,
    primitive,
)


class SolverBudgetExceeded(RuntimeError):
    """The step or wall-clock budget of a solve ran out."""


class UnsplittableBranch(RuntimeError):
    """An eliminant factor of degree > 2 without rational roots appeared."""


class Inconsistent(ValueError):
    """A linear system has no solution."""


@dataclass
class Budget:
    max_steps: int = 1_000_000
    max_seconds: float = 60.0
    steps: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self, n=1):
        self.steps += n
        if self.steps > self.max_steps:
            raise SolverBudgetExceeded(f"step budget of {self.max_steps} exhausted")
        if self.steps % 64 == 0 and time.monotonic() - self.started > self.max_seconds:
            raise SolverBudgetExceeded(f"time budget of {self.max_seconds}s exhausted")

    def remaining(self):
        return self.max_seconds - (time.monotonic() - self.started)


# ---------------------------------------------------------------------------
# polynomials in (x, y, z) whose coefficients are polynomials in unknowns


class CoeffPoly:
    """Map from (x, y, z) exponents to polynomials in the unknowns."""

    __slots__ = ("ugens", "terms")

    def __init__(self, ugens, terms=None):
        self.ugens = tuple(ugens)
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def generic(cls, ugens, names_by_mono):
        """Sum of name*monomial over ``{exponent: unknown name}``."""
        return cls(ugens, {e: Poly.gen(ugens, n) for e, n in names_by_mono.items()})

    @classmethod
    def from_poly(cls, ugens, p: Poly):
        return cls(ugens, {e: Poly.const(ugens, c) for e, c in p.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return CoeffPoly(self.ugens, out)

    def __neg__(self):
        return CoeffPoly(self.ugens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            other = CoeffPoly.from_poly(self.ugens, other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return CoeffPoly(self.ugens, out)

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c.scale(e[i])
        return CoeffPoly(self.ugens, out)

    def instantiate(self, values, gens) -> Poly:
        """Evaluate unknowns (all must be bound) into a Poly over ``gens``."""
        out = {}
        for e, c in self.terms.items():
            v = eval_poly(c, values)
            if v:
                out[e] = v
        return Poly(gens, out)


def eval_poly(p: Poly, values):
    """Evaluate a polynomial in unknowns at ``{name: Coefficient}``."""
    total = QQ(0)
    for e, c in p.terms.items():
        t = c
        for name, k in zip(p.gens, e):
            if k:
                t = t * values[name] ** k
        total = total + t
    return total


def eval_rf(r: RationalFunction, values):
    den = eval_poly(r.den, values)
    if not den:
        raise ZeroDivisionError("denominator vanishes at the chosen point")
    return eval_poly(r.num, values) / den


# ---------------------------------------------------------------------------
# systems and branches


@dataclass
class AlgebraicSystem:
    """Equations in named unknowns.

    ``stages`` optionally groups equation indices; the solver finishes one
    group on every branch before it looks at the next, which turns graded
    bilinear systems into one small bilinear stage followed by linear ones.
    """

    unknowns: tuple
    equations: list
    blocks: list = field(default_factory=list)
    stages: list | None = None

    def __post_init__(self):
        self.unknowns = tuple(self.unknowns)
        for eq in self.equations:
            if eq.gens != self.unknowns:
                raise ValueError("equation over foreign unknowns")

    def is_bilinear(self, block_a, block_b):
        """Syntactic check: degree at most one in each block."""
        ia = [self.unknowns.index(n) for n in block_a]
        ib = [self.unknowns.index(n) for n in block_b]
        for eq in self.equations:
            for e in eq.terms:
                if sum(e[i] for i in ia) > 1 or sum(e[i] for i in ib) > 1:
                    return False
        return True


def match_coefficients(identity: CoeffPoly, unknowns=None) -> AlgebraicSystem:
    """One equation per (x, y, z) monomial of an identity ``identity == 0``.

    Equations are grouped into stages by the total degree of their monomial,
    highest first.
    """
    ugens = identity.ugens if unknowns is None else tuple(unknowns)
    keys = sorted(identity.terms, key=lambda e: (sum(e), e), reverse=True)
    keys = [k for k in keys if identity.terms[k]]
    eqs = [identity.terms[k] for k in keys]
    stages = []
    last = None
    for idx, k in enumerate(keys):
        if sum(k) != last:
            stages.append([])
            last = sum(k)
        stages[-1].append(idx)
    return AlgebraicSystem(ugens, eqs, stages=stages)


@dataclass
class SolutionBranch:
    """One component of the solution set.

    ``assignments`` map solved unknowns to rational functions of the free
    unknowns; ``constraints`` are leftover relations (nonempty only for
    branches whose roots lie outside the rationals or could not be split);
    ``nonzero`` are the polynomials assumed not to vanish.
    """

    unknowns: tuple
    assignments: dict
    free: list
    constraints: list = field(default_factory=list)
    nonzero: list = field(default_factory=list)
    status: str = "ok"
    candidate: int = 0

    def value_of(self, name) -> RationalFunction:
        if name in self.assignments:
            return self.assignments[name]
        return RationalFunction.from_poly(Poly.gen(self.unknowns, name))

    def is_rational(self):
        return self.status == "ok"

    def instantiate(self, preferences=None, keep=()):
        """Choose numbers for the free unknowns and evaluate every unknown.

        ``preferences`` maps a free unknown to the values to try in order;
        unknowns without an entry try 1, 0, 2, -1, ...  Unknowns in ``keep``
        (promoted parameters) stay symbolic.  Returns ``{name: RationalFunction}``
        over the branch unknowns, using the first combination that keeps
        every nonvanishing condition and every denominator nonzero.
        """
        preferences = preferences or {}
        free = [f for f in self.free if f not in keep]
        default = [QQ(1), QQ(0), QQ(2), QQ(-1), QQ(3), QQ(-2), QQ(5)]
        choices = [list(preferences.get(f, default)) for f in free]
        idx = [0] * len(free)
        gens = self.unknowns
        for _ in range(4096):
            values = {f: choices[k][idx[k]] for k, f in enumerate(free)}
            if self._admissible(values):
                out = {f: RationalFunction.const(gens, v) for f, v in values.items()}
                for name, expr in self.assignments.items():
                    out[name] = _partial_eval(expr, values)
                for k in keep:
                    if k not in out:
                        out[k] = RationalFunction.from_poly(Poly.gen(gens, k))
                return out
            k = len(idx) - 1
            while k >= 0:
                idx[k] += 1
                if idx[k] < len(choices[k]):
                    break
                idx[k] = 0
                k -= 1
            if k < 0:
                break
        raise ValueError("no admissible point found for the free unknowns")

    def _admissible(self, values):
        for nz in self.nonzero:
            if nz.subs_many(values).is_zero():
                return False
        for expr in self.assignments.values():
            if expr.den.subs_many(values).is_zero():
                return False
        return True


def _partial_eval(expr: RationalFunction, values) -> RationalFunction:
    if not values:
        return expr
    return RationalFunction(expr.num.subs_many(values), expr.den.subs_many(values))


# ---------------------------------------------------------------------------
# rational roots


def _integer_divisors(n, limit=20000):
    n = abs(n)
    if n == 0:
        return None
    small = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if len(small) > limit:
                return None
        d += 1
        if d > 2_000_000:
            return None
    out = set(small)
    out.update(n // d for d in small)
    return sorted(out)


def rational_roots(p: Poly, i: int):
    """Rational roots of a univariate polynomial (in generator i) over Q."""
    coeffs = p.coeffs_in(i)
    if not all(c.is_constant() and is_rational(c.constant_value()) for c in coeffs.values()):
        return None
    _, prim = primitive(p)
    cs = {k: int(c.constant_value()) for k, c in prim.coeffs_in(i).items()}
    roots = []
    low = min(cs)
    if low > 0:
        roots.append(QQ(0))
    shifted = {k - low: v for k, v in cs.items()}
    deg = max(shifted)
    if deg == 0:
        return roots
    if deg == 1:
        roots.append(QQ(-shifted.get(0, 0), shifted[1]))
        return sorted(set(roots))
    if deg == 2:
        a, b, c = shifted[2], shifted.get(1, 0), shifted.get(0, 0)
        disc = b * b - 4 * a * c
        if disc >= 0 and isqrt(disc) ** 2 == disc:
            s = isqrt(disc)
            roots += [QQ(-b - s, 2 * a), QQ(-b + s, 2 * a)]
        return sorted(set(roots))
    lead_divs = _integer_divisors(shifted[deg])
    const_divs = _integer_divisors(shifted.get(0, 0))
    if lead_divs is None or const_divs is None:
        return None
    for q in lead_divs:
        for pnum in const_divs:
            for sgn in (1, -1):
                r = QQ(sgn * pnum, q)
                val = sum(QQ(c) * r ** k for k, c in shifted.items())
                if val == 0:
                    roots.append(r)
    return sorted(set(roots))


# ---------------------------------------------------------------------------
# Groebner bases (lex order on the unknowns as listed)


def _lex_lead(p: Poly):
    e = max(p.terms)
    return e, p.terms[e]


def _monic_lex(p: Poly):
    e, c = _lex_lead(p)
    if c == 1:
        return p
    inv = 1 / c
    return Poly(p.gens, {k: v * inv for k, v in p.terms.items()})


def _lex_reduce(f: Poly, basis, budget):
    """Fully reduce f modulo basis (lexicographic order)."""
    leads = [(_lex_lead(b)[0], b) for b in basis]
    r = {}
    p = dict(f.terms)
    gens = f.gens
    while p:
        e = max(p)
        c = p[e]
        for le, b in leads:
            if all(a >= bb for a, bb in zip(e, le)):
                budget.tick()
                shift = tuple(a - bb for a, bb in zip(e, le))
                for be, bc in b.terms.items():
                    ne = tuple(a + bb for a, bb in zip(shift, be))
                    v = p.get(ne, 0) - c * bc
                    if v:
                        p[ne] = v
                    else:
                        p.pop(ne, None)
                break
        else:
            r[e] = c
            del p[e]
    return Poly(gens, r)


def groebner_lex(polys, budget: Budget):
    """Reduced lexicographic Groebner basis (Buchberger with the lcm criterion)."""
    basis = []
    for p in polys:
        if p:
            basis.append(_monic_lex(p))
    if not basis:
        return []
    pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
    while pairs:
        pairs.sort(key=lambda ij: _lcm_deg(basis[ij[0]], basis[ij[1]]))
        i, j = pairs.pop(0)
        f, g = basis[i], basis[j]
        ef, eg = _lex_lead(f)[0], _lex_lead(g)[0]
        l = tuple(max(a, b) for a, b in zip(ef, eg))
        if all(a + b == c for a, b, c in zip(ef, eg, l)):
            continue  # coprime leading monomials
        mf = Poly.monomial(f.gens, tuple(a - b for a, b in zip(l, ef)))
        mg = Poly.monomial(f.gens, tuple(a - b for a, b in zip(l, eg)))
        s = mf * f - mg * g
        h = _lex_reduce(s, basis, budget)
        budget.tick()
        if h:
            h = _monic_lex(h)
            if h.is_constant():
                return [Poly.const(f.gens, 1)]
            basis.append(h)
            k = len(basis) - 1
            pairs.extend((k, m) for m in range(k))
    # minimalize and interreduce
    basis.sort(key=lambda b: _lex_lead(b)[0])
    minimal = []
    for b in basis:
        eb = _lex_lead(b)[0]
        if not any(all(x >= y for x, y in zip(eb, _lex_lead(m)[0])) for m in minimal):
            minimal = [m for m in minimal
                       if not all(x >= y for x, y in zip(_lex_lead(m)[0], eb))]
            minimal.append(b)
    reduced = []
    for k, b in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        lead_e, lead_c = _lex_lead(b)
        tail = Poly(b.gens, {e: c for e, c in b.terms.items() if e != lead_e})
        tail = _lex_reduce(tail, others, budget) if others else tail
        reduced.append(_monic_lex(tail + Poly.monomial(b.gens, lead_e, lead_c)))
    reduced.sort(key=lambda b: _lex_lead(b)[0], reverse=True)
    return reduced


def _lcm_deg(f, g):
    ef, eg = _lex_lead(f)[0], _lex_lead(g)[0]
    return sum(max(a, b) for a, b in zip(ef, eg))


# ---------------------------------------------------------------------------
# the splitting solver


@dataclass
class _State:
    eqs: list
    assign: dict
    nonzero: list
    constraints: list = field(default_factory=list)
    status: str = "ok"
    gb_done: bool = False
    pending: list = field(default_factory=list)


def _strip_nonzero(eq: Poly, nonzero):
    """Remove factors of eq that are known not to vanish."""
    changed = True
    while changed and not eq.is_constant():
        changed = False
        for nz in nonzero:
            g = gcd(eq, nz)
            if not g.is_constant():
                eq = divide_exact(eq, g)
                changed = True
                if eq.is_constant():
                    break
    return eq


def _is_const_coeff(p: Poly):
    return p.is_constant() and not p.is_zero()


def _subs_rational(eq: Poly, i: int, num: Poly, den: Poly) -> Poly:
    """eq(u_i = num/den) multiplied by den^(deg_i eq)."""
    parts = eq.coeffs_in(i)
    d = max(parts)
    if d == 0:
        return eq
    if den.is_constant():
        inv = 1 / den.constant_value()
        return eq.subs(i, num.scale(inv))
    out = Poly.zero(eq.gens)
    num_pows = [Poly.const(eq.gens, 1)]
    den_pows = [Poly.const(eq.gens, 1)]
    for _ in range(d):
        num_pows.append(num_pows[-1] * num)
        den_pows.append(den_pows[-1] * den)
    for k, c in parts.items():
        out = out + c * num_pows[k] * den_pows[d - k]
    return out


class _Solver:
    def __init__(self, unknowns, priority, budget: Budget, strict: bool, params=()):
        self.unknowns = tuple(unknowns)
        self.param_idx = {self.unknowns.index(p) for p in params}
        self.priority = priority
        self.budget = budget
        self.strict = strict
        self.branches = []

    def rank(self, i):
        return self.priority.get(self.unknowns[i], 0)

    # -- state transformations ------------------------------------------------
    def simplify(self, st: _State):
        seen = set()
        out = []
        for eq in st.eqs:
            self.budget.tick()
            if eq.is_zero():
                continue
            if st.nonzero and not eq.is_constant():
                eq = _strip_nonzero(eq, st.nonzero)
            if eq.is_constant():
                return False
            eq = normalize(eq)
            if eq not in seen:
                seen.add(eq)
                out.append(eq)
        out.sort(key=lambda p: (len(p), p.degree()))
        st.eqs = out
        return True

    def substitute(self, st: _State, i: int, num: Poly, den: Poly):
        name = self.unknowns[i]
        st.eqs = [_subs_rational(eq, i, num, den) if eq.degree_in(i) > 0 else eq for eq in st.eqs]
        new_nz = []
        for nz in st.nonzero:
            v = _subs_rational(nz, i, num, den) if nz.degree_in(i) > 0 else nz
            if v.is_zero():
                return False
            if not v.is_constant():
                new_nz.append(normalize(v))
        if not den.is_constant():
            new_nz.append(normalize(den))
        st.nonzero = _dedupe(new_nz)
        value = RationalFunction(num, den)
        new_assign = {}
        for k, r in st.assign.items():
            if r.num.degree_in(i) > 0 or r.den.degree_in(i) > 0:
                self.budget.tick()
                r = r.subs(i, value)
            new_assign[k] = r
        new_assign[name] = value
        st.assign = new_assign
        for c in st.constraints:
            if c.degree_in(i) > 0:
                st.constraints = [_subs_rational(c, i, num, den) for c in st.constraints]
                break
        return True

    def apply_assignments(self, eq: Poly, assign) -> Poly:
        """Substitute solved unknowns (values only involve free unknowns)."""
        # values involve only free unknowns, so one pass over eq's variables suffices
        present = {i: assign[self.unknowns[i]] for i in eq.variables() if self.unknowns[i] in assign}
        if not present:
            return eq
        if all(v.den.is_constant() for v in present.values()):
            self.budget.tick()
            return eq.subs_many({i: v.num.scale(1 / v.den.constant_value()) for i, v in present.items()})
        for i in eq.variables():
            val = assign.get(self.unknowns[i])
            if val is not None and eq:
                self.budget.tick()
                eq = _subs_rational(eq, i, val.num, val.den)
        return eq

    def pending_eqs(self, st, limit=None):
        out = []
        for group in st.pending[:limit]:
            for eq in group:
                eq = self.apply_assignments(eq, st.assign)
                if eq:
                    out.append(eq)
        return out

    def fork(self, st, **kw):
        s = _State(list(st.eqs), dict(st.assign), list(st.nonzero), list(st.constraints),
                   st.status, False, list(st.pending))
        for k, v in kw.items():
            setattr(s, k, v)
        return s

    # -- main loop --------------------------------------------------------------
    def run(self, st: _State):
        stack = [st]
        while stack:
            st = stack.pop()
            children = self.step(st)
            # children are pushed reversed so the first child is explored first
            for c in reversed(children):
                stack.append(c)

    def emit(self, st: _State):
        used = set(st.assign)
        free = [u for u in self.unknowns if u not in used]
        self.branches.append(SolutionBranch(self.unknowns, st.assign, free,
                                            st.constraints, st.nonzero, st.status))

    def step(self, st: _State):
        self.budget.tick()
        if not self.simplify(st):
            return []
        if not st.eqs:
            if st.pending:
                nxt = st.pending[0]
                st.pending = st.pending[1:]
                st.eqs = [self.apply_assignments(eq, st.assign) for eq in nxt]
                st.gb_done = False
                return [st]
            self.emit(st)
            return []
        # 1. linear occurrences: constant coefficient first, then (for
        # coefficient unknowns) a coefficient involving only parameters,
        # then parameters with a constant coefficient
        best = None
        for eq in st.eqs:
            for i in eq.variables():
                if eq.degree_in(i) != 1:
                    continue
                parts = eq.coeffs_in(i)
                c = parts[1]
                is_param = i in self.param_idx
                if _is_const_coeff(c):
                    key = (2 if is_param else 0, self.rank(i), len(eq), i)
                elif not is_param and self.param_idx and set(c.variables()) <= self.param_idx:
                    key = (1, len(c), c.degree(), self.rank(i), len(eq), i)
                else:
                    continue
                if best is None or key < best[0]:
                    best = (key, eq, i, parts)
        if best is not None:
            key, eq, i, parts = best
            rest = parts.get(0, Poly.zero(eq.gens))
            others = [e for e in st.eqs if e is not eq]
            if key[0] == 1:
                c = parts[1]
                vanish = self.fork(st, eqs=others + [c, rest])
                solved = self.fork(st, eqs=others, nonzero=st.nonzero + [normalize(c)])
                if not self.substitute(solved, i, -rest, c):
                    solved = None
                return [s for s in (vanish, solved) if s is not None]
            c = parts[1].constant_value()
            st.eqs = others
            if not self.substitute(st, i, -rest, Poly.const(eq.gens, c)):
                return []
            st.gb_done = False
            return [st]
        # 2. factor splitting via monomial content
        for eq in st.eqs:
            e = tuple(min(col) for col in zip(*eq.terms))
            if any(e):
                i = next(k for k, v in enumerate(e) if v)
                u = Poly.gen(self.unknowns, self.unknowns[i])
                zero = self.fork(st)
                if not self.substitute(zero, i, Poly.zero(self.unknowns), Poly.const(self.unknowns, 1)):
                    zero = None
                nonzero = self.fork(st, nonzero=st.nonzero + [u])
                return [c for c in (zero, nonzero) if c is not None]
        # 3. linear occurrence with a nonconstant coefficient
        best = None
        for eq in st.eqs:
            for i in eq.variables():
                if eq.degree_in(i) != 1:
                    continue
                parts = eq.coeffs_in(i)
                c = parts[1]
                key = (len(c), c.degree(), self.rank(i), len(eq), i)
                if best is None or key < best[0]:
                    best = (key, eq, i, parts)
        if best is not None:
            _, eq, i, parts = best
            c = parts[1]
            rest = parts.get(0, Poly.zero(eq.gens))
            others = [e for e in st.eqs if e is not eq]
            vanish = self.fork(st, eqs=others + [c, rest])
            solved = self.fork(st, eqs=others, nonzero=st.nonzero + [normalize(c)])
            if not self.substitute(solved, i, -rest, c):
                solved = None
            return [s for s in (vanish, solved) if s is not None]
        # 4. univariate equations
        for eq in st.eqs:
            vs = eq.variables()
            if len(vs) == 1:
                return self.split_univariate(st, eq, vs[0])
        # 5. content splitting
        for eq in st.eqs:
            for i in eq.variables():
                parts = eq.coeffs_in(i)
                if len(parts) < 2:
                    continue
                cont = None
                for c in parts.values():
                    cont = c if cont is None else gcd(cont, c)
                    if cont.is_constant():
                        break
                if cont is not None and not cont.is_constant():
                    others = [e for e in st.eqs if e is not eq]
                    a = self.fork(st, eqs=others + [cont])
                    b = self.fork(st, eqs=others + [divide_exact(eq, cont)],
                                  nonzero=st.nonzero + [normalize(cont)])
                    return [a, b]
        # 6. quadratic equations with a square discriminant factor
        for eq in st.eqs:
            for i in eq.variables():
                if eq.degree_in(i) != 2:
                    continue
                factors = _split_quadratic(eq, i)
                if factors is not None:
                    f1, f2 = factors
                    others = [e for e in st.eqs if e is not eq]
                    a = self.fork(st, eqs=others + [f1])
                    b = self.fork(st, eqs=others + [f2], nonzero=st.nonzero + [f1])
                    return [a, b]
        # 7. Groebner basis fallback
        if not st.gb_done:
            gb = groebner_lex(st.eqs, self.budget)
            if gb and gb[0].is_constant():
                return []
            nxt = self.fork(st, eqs=gb)
            nxt.gb_done = True
            return [nxt]
        # nothing splits: record what is left
        if self.strict:
            raise UnsplittableBranch("cannot split remaining equations: "
                                     + "; ".join(map(str, st.eqs)))
        st.constraints = st.constraints + st.eqs + self.pending_eqs(st)
        st.eqs = []
        st.pending = []
        st.status = "unsplittable"
        self.emit(st)
        return []

    def split_univariate(self, st, eq, i):
        roots = rational_roots(eq, i)
        out = []
        rest = eq
        if roots:
            for r in roots:
                child = self.fork(st, eqs=[e for e in st.eqs if e is not eq])
                if self.substitute(child, i, Poly.const(self.unknowns, r), Poly.const(self.unknowns, 1)):
                    out.append(child)
                lin = Poly.gen(self.unknowns, self.unknowns[i]) - r
                while True:
                    try:
                        rest = divide_exact(rest, lin)
                    except Exception:
                        break
        if rest.degree_in(i) >= 1:
            d = rest.degree_in(i)
            if d > 2 and self.strict:
                raise UnsplittableBranch(f"eliminant of degree {d}: {rest}")
            child = self.fork(st, eqs=[e for e in st.eqs if e is not eq])
            others = child.eqs + self.pending_eqs(child, limit=1)
            if d <= 2:
                # an irreducible quadratic: reduce the rest modulo it and drop
                # the branch when something nonzero in that unknown alone is left
                others = [_reduce_mod(e, rest, i) for e in others]
                others = [e for e in others if not e.is_zero()]
                if any(set(e.variables()) <= {i} for e in others):
                    return out
                others = _dedupe([normalize(e) for e in others])
            child.constraints = child.constraints + [normalize(rest)] + others
            child.eqs = []
            child.pending = []
            child.status = "nonrational" if d <= 2 else "unsplittable"
            used = set(child.assign)
            free = [u for u in self.unknowns if u not in used]
            self.branches.append(SolutionBranch(self.unknowns, child.assign, free,
                                                child.constraints, child.nonzero, child.status))
        return out


def _reduce_mod(eq: Poly, f: Poly, i: int) -> Poly:
    """Remainder of eq on division by f, which has constant lead coefficient in i."""
    d = f.degree_in(i)
    parts = f.coeffs_in(i)
    lead = parts[d].constant_value()
    u = Poly.gen(eq.gens, eq.gens[i])
    while eq.degree_in(i) >= d:
        k = eq.degree_in(i)
        top = eq.coeffs_in(i)[k]
        eq = eq - (top * u ** (k - d) * f).scale(1 / lead)
    return eq


def _split_quadratic(eq: Poly, i: int):
    """Factor eq (quadratic in generator i) when its discriminant is a square."""
    parts = eq.coeffs_in(i)
    zero = Poly.zero(eq.gens)
    A, B, C = parts.get(2, zero), parts.get(1, zero), parts.get(0, zero)
    disc = B * B - (A * C).scale(4)
    S = poly_sqrt(disc)
    if S is None:
        return None
    u = Poly.gen(eq.gens, eq.gens[i])
    f1 = (A * u).scale(2) + B - S
    f2 = (A * u).scale(2) + B + S
    g1 = _pp_in(f1, i)
    g2 = _pp_in(f2, i)
    prod = g1 * g2
    try:
        q = divide_exact(eq, prod)
    except Exception:
        return None
    if not q.is_constant():
        return None
    return normalize(g1), normalize(g2)


def _pp_in(p: Poly, i: int) -> Poly:
    from .polyring import content_in

    c = content_in(p, i)
    return divide_exact(p, c) if not c.is_constant() else p


def _dedupe(polys):
    seen = []
    for p in polys:
        if p not in seen:
            seen.append(p)
    return seen


def solve_system(sys: AlgebraicSystem, mode: str = "numeric-params", *, params=(),
                 priority=None, budget: Budget | None = None, strict=False,
                 normalize_block=None, fixed=None):
    """Solve a system; returns a list of SolutionBranch.

    ``params`` names unknowns that are promoted ODE parameters (parametric
    mode); they are eliminated last.  ``normalize_block`` lists unknowns in
    descending monomial order; each candidate sets one of them to 1 and all
    earlier ones to 0, removing the scaling freedom of a homogeneous block.
    ``fixed`` binds unknowns to numbers before solving.
    """
    if mode not in ("numeric-params", "parametric"):
        raise ValueError(f"unknown mode {mode!r}")
    budget = budget or Budget()
    prio = dict(priority or {})
    for p in params:
        prio[p] = max(prio.values(), default=0) + 10
    unknowns = sys.unknowns
    idx = {n: k for k, n in enumerate(unknowns)}
    candidates = [dict(fixed or {})]
    if normalize_block:
        candidates = []
        for k, lead in enumerate(normalize_block):
            c = dict(fixed or {})
            for prev in normalize_block[:k]:
                c[prev] = QQ(0)
            c[lead] = QQ(1)
            candidates.append(c)
    results = []
    for cand_index, binding in enumerate(candidates):
        solver = _Solver(unknowns, prio, budget, strict, params)
        if sys.stages:
            groups = [[sys.equations[i] for i in g] for g in sys.stages]
            st = _State(groups[0], {}, [], pending=groups[1:])
        else:
            st = _State(list(sys.equations), {}, [])
        ok = True
        for name, val in binding.items():
            if not solver.substitute(st, idx[name], Poly.const(unknowns, val), Poly.const(unknowns, 1)):
                ok = False
        if not ok:
            continue
        solver.run(st)
        for b in solver.branches:
            b.candidate = cand_index
            if b.status == "ok":
                check_branch(sys, b)
            results.append(b)
    return results


def check_branch(sys: AlgebraicSystem, br: SolutionBranch):
    """Assert that the branch assignments annihilate every equation."""
    for eq in sys.equations:
        num = eq
        for name, val in br.assignments.items():
            i = sys.unknowns.index(name)
            if num.degree_in(i) > 0:
                num = _subs_rational(num, i, val.num, val.den)
        if not num.is_zero():
            raise AssertionError(f"branch does not satisfy {eq}")


def linear_solve(sys: AlgebraicSystem, block=None) -> SolutionBranch:
    """Exact general solution of a system linear in ``block`` (default: all)."""
    block = list(block or sys.unknowns)
    bi = [sys.unknowns.index(n) for n in block]
    for eq in sys.equations:
        for e in eq.terms:
            if sum(e[i] for i in bi) > 1:
                raise ValueError("system is not linear in the block")
    rows = [eq for eq in sys.equations if eq]
    assign = {}
    unknowns = sys.unknowns
    for col_name in block:
        i = unknowns.index(col_name)
        pivot_row = None
        for r in rows:
            c = r.coeffs_in(i).get(1)
            if c is not None and c.is_constant():
                pivot_row = r
                break
        if pivot_row is None:
            continue
        parts = pivot_row.coeffs_in(i)
        c = parts[1].constant_value()
        value = (-parts.get(0, Poly.zero(unknowns))).scale(1 / c)
        rows = [r.subs(i, value) for r in rows if r is not pivot_row]
        assign = {k: v.subs(i, value) for k, v in assign.items()}
        assign[col_name] = value
        rows = [r for r in rows if r]
    for r in rows:
        if r.is_constant():
            raise Inconsistent(f"inconsistent linear system (residual {r})")
    if rows:
        raise ValueError("coefficients of the linear block are not constant")
    free = [n for n in unknowns if n not in assign]
    return SolutionBranch(unknowns, {k: RationalFunction.from_poly(v) for k, v in assign.items()}, free)
