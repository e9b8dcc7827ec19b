"""Darboux polynomials (eigenpolynomials) of the derivation of a SOODE."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .algsys import (
    Budget,
    CoeffPoly,
    SolutionBranch,
    match_coefficients,
    solve_system,
)
from .odemodel import Soode
from .polyring import (
    XYZ,
    Indivisible,
    Poly,
    QQ,
    RationalFunction,
    divide_exact,
    format_poly,
    grevlex_key,
    is_rational,
    make_coeff,
    normalize,
    primitive,
    coprime_basis,
)


@dataclass
class DarbouxPair:
    """An eigenpolynomial v with cofactor g, D[v] = g*v.

    ``soode`` is the equation the identity holds for: the input equation with
    the branch's parameter relations substituted (it equals the input when
    no parameter was solved for).  ``constraints`` are those relations as
    text, e.g. ``"25*c2 - 6*c1^2 = 0"``.
    """

    v: Poly
    g: Poly
    soode: Soode
    constraints: tuple = ()
    bindings: dict = field(default_factory=dict)
    branch: SolutionBranch | None = None

    @property
    def degree(self):
        return self.v.degree()

    def check(self) -> bool:
        d = self.soode.derivation()
        try:
            return divide_exact(d.apply_poly(self.v), self.v) == self.g
        except Indivisible:
            return False


def cofactor_degree_bound(s: Soode) -> int:
    """Degree bound for cofactors: max(deg_N + 1, deg_M) - 1."""
    return max(s.deg_N + 1, s.deg_M) - 1


def monomials_upto(deg, nvars=3):
    """All exponent tuples of total degree <= deg, in descending degrevlex."""
    out = []
    for d in range(deg + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for k in combo:
                e[k] += 1
            out.append(tuple(e))
    out = sorted(set(out), key=grevlex_key, reverse=True)
    return out


def lift_to_unknowns(p: Poly, ugens, params) -> CoeffPoly:
    """View a Poly over Q(params) as a CoeffPoly over the unknown ring.

    Promoted parameters (``params``, a subset of ``ugens``) move from the
    coefficients into the unknown ring; other parameters stay coefficients.
    """
    terms = {}
    for e, c in p.terms.items():
        if is_rational(c) or not params:
            terms[e] = Poly.const(ugens, c)
        else:
            if not c.den.is_constant():
                raise ValueError("promoted parameters may not appear in denominators")
            terms[e] = c.num.with_gens(ugens).scale(1 / c.den.constant_value())
    return CoeffPoly(ugens, terms)


def rf_to_coeff(r: RationalFunction, pgens):
    """Turn a rational function in (promoted) parameters into a Coefficient."""
    if r.is_constant():
        return r.constant_value()
    num = r.num.drop_to(pgens)
    den = r.den.drop_to(pgens)
    return make_coeff(num, den)


def format_relation(name, value: RationalFunction, pgens) -> str:
    """Render ``name = num/den`` as ``den*name - num = 0``."""
    num = value.num.drop_to(pgens)
    den = value.den.drop_to(pgens)
    k, den_p = primitive(den)
    num = num.scale(1 / k)
    # clear rational denominators so the relation has integer coefficients
    from math import lcm
    dens = [int(c.denominator) for c in list(num.terms.values()) + list(den_p.terms.values())]
    m = lcm(*dens) if dens else 1
    num = num.scale(m)
    den_p = den_p.scale(m)
    var = Poly.gen(pgens, name)
    lhs = format_poly(den_p * var)
    if den_p.is_constant() and den_p.constant_value() != 1 and len(den_p) == 1:
        lhs = f"{den_p.constant_value()}*{name}"
    elif not den_p.is_constant():
        lhs = f"({format_poly(den_p)})*{name}"
    rhs = format_poly(num)
    if num.is_zero():
        return f"{lhs} = 0"
    if rhs.startswith("-"):
        return f"{lhs} + {rhs[1:]} = 0"
    parts = rhs.replace(" - ", " \0 ").replace(" + ", " - ").replace(" \0 ", " + ")
    return f"{lhs} - {parts} = 0"


def _darboux_system(s: Soode, d: int, params_promoted):
    vmonos = monomials_upto(d)
    gmonos = monomials_upto(max(cofactor_degree_bound(s), 0))
    anames = [f"a{k}" for k in range(len(vmonos))]
    bnames = [f"b{k}" for k in range(len(gmonos))]
    ugens = tuple(anames + bnames + list(params_promoted))
    v = CoeffPoly.generic(ugens, dict(zip(vmonos, anames)))
    g = CoeffPoly.generic(ugens, dict(zip(gmonos, bnames)))
    M = lift_to_unknowns(s.M, ugens, params_promoted)
    N = lift_to_unknowns(s.N, ugens, params_promoted)
    zN = N * Poly.gen(XYZ, "y'")
    Dv = N * v.diff(0) + zN * v.diff(1) + M * v.diff(2)
    ident = Dv - g * v
    sys = match_coefficients(ident, ugens)
    sys.blocks = [anames, bnames, list(params_promoted)]
    top = [a for a, e in zip(anames, vmonos) if sum(e) == d]
    return sys, vmonos, gmonos, anames, bnames, top


def _pairs_from_branch(s: Soode, br: SolutionBranch, vmonos, gmonos, anames, bnames,
                       params_promoted):
    prefs = {a: [QQ(0), QQ(1), QQ(2), QQ(-1), QQ(3)] for a in anames}
    vals = br.instantiate(prefs, keep=params_promoted)
    pg = tuple(params_promoted) if params_promoted else ()
    bindings = {}
    constraints = []
    if pg:
        for p in pg:
            if p in br.assignments:
                expr = vals[p]
                bindings[p] = expr
                constraints.append(format_relation(p, expr, pg))
    sub = s
    if bindings:
        param_gens = s.params
        coeff_bind = {p: rf_to_coeff(v, pg) for p, v in bindings.items()}
        coeff_bind = {p: _to_full(c, param_gens) for p, c in coeff_bind.items()}
        sub = s.substitute(coeff_bind)
    target_gens = sub.params

    def coeff(name):
        c = rf_to_coeff(vals[name], pg) if pg else vals[name].constant_value()
        if pg and not is_rational(c):
            c = _reparam(c, target_gens)
        return c

    v = Poly(XYZ, {e: coeff(n) for e, n in zip(vmonos, anames)})
    g = Poly(XYZ, {e: coeff(n) for e, n in zip(gmonos, bnames)})
    return v, g, sub, tuple(constraints), bindings


def _to_full(c, param_gens):
    if is_rational(c):
        return c
    return make_coeff(c.num.with_gens(param_gens), c.den.with_gens(param_gens))


def _reparam(c, gens):
    if is_rational(c):
        return c
    return make_coeff(c.num.with_gens(gens) if set(c.num.gens) <= set(gens) else c.num.drop_to(gens),
                      c.den.with_gens(gens) if set(c.den.gens) <= set(gens) else c.den.drop_to(gens))


def _split_into_atoms(pairs):
    """Refine a list of pairs (same equation) into coprime, squarefree pieces."""
    if not pairs:
        return []
    atoms = coprime_basis([p.v for p in pairs])
    return [_make_pair(pairs[0], a) for a in atoms]


def _make_pair(template: DarbouxPair, v: Poly) -> DarbouxPair:
    v = normalize(v)
    d = template.soode.derivation()
    g = divide_exact(d.apply_poly(v), v)
    return DarbouxPair(v, g, template.soode, template.constraints, template.bindings,
                       template.branch)


def find_eigenpolynomials(s: Soode, deg: int, parametric: bool = False,
                          budget: Budget | None = None, strict=False):
    """Darboux pairs of degree <= deg (see module docstring)."""
    if deg < 1:
        raise ValueError("deg must be at least 1")
    budget = budget or Budget()
    promoted = tuple(s.params) if parametric else ()
    found = {}
    order = []
    for d in range(1, deg + 1):
        sys, vmonos, gmonos, anames, bnames, top = _darboux_system(s, d, promoted)
        prio = {n: 0 for n in anames}
        prio.update({n: 1 for n in bnames})
        branches = solve_system(sys, "parametric" if parametric else "numeric-params",
                                params=promoted, priority=prio, budget=budget,
                                strict=strict, normalize_block=top)
        for br in branches:
            if not br.is_rational():
                continue
            try:
                v, g, sub, cons, binds = _pairs_from_branch(s, br, vmonos, gmonos,
                                                            anames, bnames, promoted)
            except ValueError:
                continue
            if v.is_constant():
                continue
            pair = DarbouxPair(normalize(v), g, sub, cons, binds, br)
            key = cons
            found.setdefault(key, []).append(pair)
            if key not in order:
                order.append(key)
    out = []
    for key in order:
        atoms = _split_into_atoms(found[key])
        atoms = [a for a in atoms if a.v.degree() <= deg]
        atoms.sort(key=lambda a: [grevlex_key(e) for e, _ in a.v.sorted_terms()], reverse=True)
        atoms.sort(key=lambda a: a.v.degree())
        for a in atoms:
            if not a.check():
                raise AssertionError(f"eigenpolynomial check failed for {a.v}")
        out.extend(atoms)
    return out
