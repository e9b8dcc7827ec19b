"""Determination of S = P/Q and R = Q * prod v_i^m_i from Darboux pairs."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algsys import (
    AlgebraicSystem,
    Budget,
    CoeffPoly,
    SolutionBranch,
    match_coefficients,
    solve_system,
)
from .darboux import lift_to_unknowns, monomials_upto
from .odemodel import Soode
from .polyring import (
    XYZ,
    Indivisible,
    Poly,
    QQ,
    RationalFunction,
    divide_exact,
    format_poly,
    gcd,
    normalize,
    primitive,
    to_qq,
)

Z = Poly.gen(XYZ, "y'")


@dataclass
class SRSolution:
    """S = P/Q and R = Q * prod(v_i ** m_i) for one equation.

    ``factors`` lists (v, g, m) with m a nonzero rational; ``soode`` is the
    equation the identities refer to.
    """

    soode: Soode
    P: Poly
    Q: Poly
    factors: list
    degQ: int = 0
    branch: SolutionBranch | None = None
    constraints: tuple = ()

    @property
    def S(self) -> RationalFunction:
        return RationalFunction(self.P, self.Q)

    def exponent_sum(self) -> Poly:
        """sum m_i g_i."""
        total = Poly.zero(XYZ)
        for _, g, m in self.factors:
            total = total + g.scale(m)
        return total

    def logderiv(self):
        """(R_x/R, R_y/R, R_z/R) as rational functions, from v's derivatives."""
        out = []
        for i in range(3):
            acc = RationalFunction(self.Q.diff(i), self.Q)
            for v, _, m in self.factors:
                dv = v.diff(i)
                if dv:
                    acc = acc + RationalFunction(dv.scale(m), v)
            out.append(acc)
        return tuple(out)

    def R_text(self):
        parts = []
        q = format_poly(self.Q)
        if q != "1":
            parts.append(f"({q})")
        for v, _, m in self.factors:
            parts.append(f"({format_poly(v)})^({m})")
        return "*".join(parts) if parts else "1"


@dataclass
class OutOfClass:
    """A branch whose exponents or coefficients are not rational."""

    degQ: int
    reason: str
    constraints: list = field(default_factory=list)


def degree_of_P(s: Soode, degQ: int) -> int:
    if degQ < 0:
        raise ValueError("degQ must be nonnegative")
    return degQ + max(s.deg_M - 1, s.deg_N)


def _derive(s: Soode, f: CoeffPoly, ugens) -> CoeffPoly:
    N = lift_to_unknowns(s.N, ugens, ())
    M = lift_to_unknowns(s.M, ugens, ())
    zN = N * Z
    return N * f.diff(0) + zN * f.diff(1) + M * f.diff(2)


def build_sr_equations(s: Soode, pairs, degQ: int, eliminate_P=True, third=False):
    """The two determination identities as an AlgebraicSystem.

    With ``eliminate_P`` the first identity is used to express P (it enters
    with coefficient -1), leaving the second identity in the Q-coefficients
    and exponents only.  With ``third`` the third compatibility condition,
    cleared of denominators, is appended as further stages so that families
    of solutions are cut down to admissible members.
    Returns (system, qnames, mnames, pnames, P_expr, qmonos).
    """
    if not pairs:
        raise ValueError("at least one Darboux pair is required")
    qmonos = monomials_upto(degQ)
    qnames = [f"q{k}" for k in range(len(qmonos))]
    mnames = [f"m{k + 1}" for k in range(len(pairs))]
    pmonos = monomials_upto(degree_of_P(s, degQ))
    pnames = [] if eliminate_P else [f"p{k}" for k in range(len(pmonos))]
    ugens = tuple(qnames + mnames + pnames)
    Q = CoeffPoly.generic(ugens, dict(zip(qmonos, qnames)))
    G = CoeffPoly(ugens, {})
    for mname, pr in zip(mnames, pairs):
        G = G + CoeffPoly.from_poly(ugens, pr.g) * CoeffPoly(ugens, {(0, 0, 0): Poly.gen(ugens, mname)})
    div = CoeffPoly.from_poly(ugens, s.divergence())
    DQ = _derive(s, Q, ugens)
    cross = CoeffPoly.from_poly(ugens, s.N * s.M.diff(1) - s.M * s.N.diff(1))
    if eliminate_P:
        P = -(DQ + Q * (div + G))
        ident = P * G + _derive(s, P, ugens) + Q * cross
        sys = match_coefficients(ident, ugens)
        if third:
            extra = match_coefficients(_third_identity(s, pairs, P, Q, mnames, ugens), ugens)
            offset = len(sys.equations)
            sys = AlgebraicSystem(ugens, sys.equations + extra.equations,
                                  stages=sys.stages + [[offset + i for i in g] for g in extra.stages])
    else:
        P = CoeffPoly.generic(ugens, dict(zip(pmonos, pnames)))
        first = Q * G + DQ + P + Q * div
        second = P * G + _derive(s, P, ugens) + Q * cross
        a = match_coefficients(first, ugens)
        b = match_coefficients(second, ugens)
        sys = AlgebraicSystem(ugens, a.equations + b.equations)
    sys.blocks = [qnames + pnames, mnames]
    return sys, qnames, mnames, pnames, P, qmonos


def _third_identity(s: Soode, pairs, P: CoeffPoly, Q: CoeffPoly, mnames, ugens) -> CoeffPoly:
    """(P_z - (QN)_y) V + P sum m_i v_iz V/v_i - QN sum m_i v_iy V/v_i, V = prod v_i."""
    V = Poly.const(XYZ, 1)
    for pr in pairs:
        V = V * pr.v
    QN = Q * s.N
    out = (P.diff(2) - QN.diff(1)) * V
    for pr, mname in zip(pairs, mnames):
        rest = divide_exact(V, pr.v)
        mterm = CoeffPoly(ugens, {(0, 0, 0): Poly.gen(ugens, mname)})
        out = out + P * mterm * (pr.v.diff(2) * rest) - QN * mterm * (pr.v.diff(1) * rest)
    return out


def check_determination_1(sr: SRSolution) -> bool:
    """Q sum m_i g_i == -D[Q] - P - Q (N_x + N_y y' + M_y')."""
    s = sr.soode
    lhs = sr.Q * sr.exponent_sum()
    rhs = -s.derivation().apply_poly(sr.Q) - sr.P - sr.Q * s.divergence()
    return lhs == rhs


def check_determination_2(sr: SRSolution) -> bool:
    """P sum m_i g_i == -D[P] - Q (N M_y - M N_y)."""
    s = sr.soode
    lhs = sr.P * sr.exponent_sum()
    rhs = -s.derivation().apply_poly(sr.P) - sr.Q * (s.N * s.M.diff(1) - s.M * s.N.diff(1))
    return lhs == rhs


def check_log_derivative(sr: SRSolution) -> bool:
    """D[R]/R = -(S + N_x + N_y y' + M_y'), with D[R]/R from v derivatives."""
    s = sr.soode
    lx, ly, lz = sr.logderiv()
    N = RationalFunction.from_poly(s.N)
    M = RationalFunction.from_poly(s.M)
    zN = RationalFunction.from_poly(Z * s.N)
    dlog = N * lx + zN * ly + M * lz
    target = -(sr.S + RationalFunction.from_poly(s.divergence()))
    return dlog == target


def check_third_condition(s: Soode, sr: SRSolution) -> bool:
    """(R*S)_y' = (R*N)_y divided by R: (R_y'/R) S + S_y' = (R_y/R) N + N_y.

    This is the closedness of the y/y' block of the one-form
    R[(M + S y') dx - S dy - N dy'].
    """
    _, ly, lz = sr.logderiv()
    S = sr.S
    N = RationalFunction.from_poly(s.N)
    lhs = lz * S + S.diff(2)
    rhs = ly * N + RationalFunction.from_poly(s.N.diff(1))
    return lhs == rhs


def _absorb(P: Poly, Q: Poly, factors):
    """Cancel gcd(P, Q) into the Darboux factors when it is a product of them."""
    h = gcd(P, Q) if P else normalize(Q)
    if h.is_constant():
        return P, Q, factors
    rest = h
    exps = {k: m for k, (_, _, m) in enumerate(factors)}
    for k, (v, _, _) in enumerate(factors):
        while not rest.is_constant():
            try:
                rest = divide_exact(rest, v)
            except Indivisible:
                break
            exps[k] = exps[k] + 1
    if not rest.is_constant():
        return P, Q, factors
    Pr = divide_exact(P, h) if P else P
    Qr = divide_exact(Q, h)
    new = [(v, g, exps[k]) for k, (v, g, _) in enumerate(factors)]
    return Pr, Qr, new


def _canonical(P, Q, factors):
    k, Qn = primitive(Q)
    Pn = P.map_coeffs(lambda c: c / k) if P else P
    return Pn, Qn, [(v, g, m) for v, g, m in factors if m != 0]


def solve_sr(s: Soode, pairs, degQ: int, budget: Budget | None = None, strict=False):
    """All rational S/R solutions with generic Q of degree <= degQ.

    Returns (solutions, out_of_class, rejected) where ``rejected`` counts
    solutions dropped by the third compatibility condition.
    """
    if not pairs:
        return [], [], 0
    budget = budget or Budget()
    sys, qnames, mnames, _, Pexpr, qmonos = build_sr_equations(s, pairs, degQ, third=True)
    prio = {n: 0 for n in qnames}
    prio.update({n: 1 for n in mnames})
    branches = solve_system(sys, priority=prio, budget=budget, strict=strict,
                            normalize_block=qnames)
    sols, ooc, rejected = [], [], 0
    seen = set()
    prefs = {n: [QQ(1), QQ(0), QQ(2), QQ(-1), QQ(3)] for n in qnames}
    prefs.update({n: [QQ(0), QQ(1), QQ(-1), QQ(2), QQ(-2)] for n in mnames})
    for br in branches:
        if not br.is_rational():
            ooc.append(OutOfClass(degQ, br.status,
                                  [f"{format_poly(c)} = 0" for c in br.constraints]))
            continue
        try:
            vals = br.instantiate(prefs)
        except ValueError:
            continue
        num = {k: v.constant_value() for k, v in vals.items()}
        Q = Poly(XYZ, {e: num[n] for e, n in zip(qmonos, qnames)})
        if Q.is_zero():
            continue
        P = Pexpr.instantiate(num, XYZ)
        factors = [(pr.v, pr.g, to_qq(num[m])) for pr, m in zip(pairs, mnames)]
        P, Q, factors = _absorb(P, Q, factors)
        P, Q, factors = _canonical(P, Q, factors)
        sr = SRSolution(s, P, Q, factors, degQ, br,
                        pairs[0].constraints if pairs else ())
        if not (check_determination_1(sr) and check_determination_2(sr)):
            raise AssertionError("S/R solution fails the determination identities")
        if not check_third_condition(s, sr):
            rejected += 1
            continue
        key = sr.S
        if key in seen:
            continue
        seen.add(key)
        sols.append(sr)
    return sols, ooc, rejected
