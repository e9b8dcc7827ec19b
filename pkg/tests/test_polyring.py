import pytest
from hypothesis import given, settings

from psode.odemodel import parse_param_value, poly_from_text as P
from psode.polyring import (
    XYZ,
    Indivisible,
    RationalFunction,
    coprime_basis,
    divide_exact,
    gcd,
    normalize,
    squarefree_part,
    substitute_params,
)
from strategies import polys

PARAMS = ("c1", "c2", "beta")


def test_difference_of_squares():
    assert P("x + y") * P("x - y") == P("x^2 - y^2")


def test_additive_identity():
    p = P("3*x*y'^2 + y*y'")
    assert p + P("0") == p


def test_product_degree():
    # frozen from an independent symbolic expansion
    prod = P("y") * P("x*y'")
    assert prod == P("x*y*y'")
    assert prod.degree() == 3


def test_differentiate():
    assert P("3*x*y'^2 + y*y'").diff(2) == P("6*x*y' + y")
    assert P("y^3").diff(0).is_zero()
    assert P("x*y").diff(1) == P("x")


def test_divide_exact():
    assert divide_exact(P("x^2 - y^2"), P("x - y")) == P("x + y")
    assert divide_exact(P("x*y"), P("x")) == P("y")
    with pytest.raises(Indivisible):
        divide_exact(P("x^2 + 1"), P("x"))


def test_gcd_examples():
    assert gcd(P("x^2*y"), P("x*y^2")) == P("x*y")
    assert gcd(P("x^2 - y^2"), P("x^2 + 2*x*y + y^2")) == P("x + y")
    assert gcd(P("2*x + 4*y"), P("0")) == normalize(P("x + 2*y"))


def test_substitute_params():
    c2y = P("c2*y", PARAMS)
    value = parse_param_value("6/25*c1^2", PARAMS)
    assert substitute_params(c2y, {"c2": value}) == P("6/25*c1^2*y", PARAMS)
    assert substitute_params(c2y, {}) == c2y
    b = P("beta*y^2*y'", PARAMS)
    assert substitute_params(b, {"beta": 1}) == P("y^2*y'", PARAMS)


def test_squarefree_part():
    assert squarefree_part(P("(x + y)^2")) == normalize(P("x + y"))
    assert squarefree_part(P("x^2*y^3")) == P("x*y")
    # (x - y)(x + y)^2 -> x^2 - y^2, frozen from an independent oracle
    assert squarefree_part(P("(x - y)*(x + y)^2")) == normalize(P("x^2 - y^2"))


def test_coprime_basis_splits_shared_factors():
    atoms = coprime_basis([P("x*y"), P("x^2*(y + 1)")])
    assert sorted(map(str, atoms)) == ["x", "y", "y + 1"]


def test_rational_function_reduced():
    r = RationalFunction(P("x^2 - y^2"), P("x - y"))
    assert r.is_polynomial() and r.as_poly() == P("x + y")


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a


@settings(max_examples=60, deadline=None)
@given(polys(), polys(nonzero=True))
def test_divide_exact_inverts_mul(p, q):
    assert divide_exact(p * q, q) == p


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=2, nonzero=True))
def test_gcd_divides_both(a, b, common):
    a, b = a * common, b * common
    g = gcd(a, b)
    if not a.is_zero():
        divide_exact(a, g)
    if not b.is_zero():
        divide_exact(b, g)
    if not (a.is_zero() and b.is_zero()):
        divide_exact(g, normalize(common))


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_leibniz(p, q):
    for i in range(3):
        assert (p * q).diff(i) == p * q.diff(i) + q * p.diff(i)


@settings(max_examples=60, deadline=None)
@given(polys(nonzero=True), polys(nonzero=True))
def test_degree_additive(p, q):
    assert (p * q).degree() == p.degree() + q.degree()


def test_substitution_commutes_with_mul():
    a = P("c1*x + c2*y'", PARAMS)
    b = P("beta*y^2 - c2", PARAMS)
    bind = {"c2": parse_param_value("6/25*c1^2", PARAMS), "beta": parse_param_value("3", PARAMS)}
    assert substitute_params(a * b, bind) == substitute_params(a, bind) * substitute_params(b, bind)


def test_gens():
    assert P("x").gens == XYZ


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3, nonzero=True))
def test_gcd_agrees_with_sympy(a, b, common):
    sp = __import__("sympy")
    x, y, z = sp.symbols("x y z")

    def to_sympy(p):
        return sum(sp.Rational(int(c.numerator), int(c.denominator)) * x**e[0] * y**e[1] * z**e[2]
                   for e, c in p.terms.items())

    a, b = a * common, b * common
    if a.is_zero() or b.is_zero():
        return
    ours = gcd(a, b)
    theirs = sp.Poly(sp.gcd(to_sympy(a), to_sympy(b)), x, y, z)
    assert ours.degree() == theirs.total_degree()
    assert sp.expand(to_sympy(ours) * theirs.LC() - theirs.as_expr() * to_sympy(ours).as_poly(x, y, z).LC()) == 0
