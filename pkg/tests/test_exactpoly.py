from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from k3cert.exactpoly import (
    I,
    GaussRat,
    MultiPoly,
    ParseError,
    check_homogeneous,
    dehomogenize,
    divides,
    evaluate_exact,
    evaluate_num,
    gcd_many,
    gcd_poly,
    homogenize,
    parse_gaussrat,
    parse_poly,
    partial_derivative,
    resultant,
    squarefree_part,
    sylvester_matrix,
    univariate_roots,
)
from oracles import from_sympy, random_poly, to_sympy

X4 = ("x0", "x1", "x2", "x3")
FERMAT = "x0^4+x1^4+x2^4+x3^4"

# -- Gaussian rationals -------------------------------------------------------

fractions = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 50))
gaussrats = st.builds(GaussRat, fractions, fractions)


@given(gaussrats, gaussrats, gaussrats)
def test_gaussrat_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if a:
        assert a * a.inverse() == GaussRat(1)


@given(gaussrats)
def test_gaussrat_conjugate_norm(a):
    assert a * a.conjugate() == GaussRat(a.norm())
    assert complex(a) == pytest.approx(complex(float(a.re), float(a.im)))


def test_gaussrat_from_complex_is_exact_binary_value():
    z = complex(0.1, -0.3)
    g = GaussRat.from_complex(z)
    assert g.re == Fraction(0.1) and g.im == Fraction(-0.3)


def test_i_squared():
    assert I * I == GaussRat(-1)


# -- parsing and canonical form -------------------------------------------------


def test_parse_fermat():
    f = parse_poly(FERMAT, X4)
    assert f.terms == {(4, 0, 0, 0): GaussRat(1), (0, 4, 0, 0): GaussRat(1), (0, 0, 4, 0): GaussRat(1), (0, 0, 0, 4): GaussRat(1)}


def test_parse_zero_is_empty():
    assert parse_poly("0", ("x",)).terms == {}


def test_parse_gaussian_coefficient_cancels():
    p = parse_poly("(1+2i)/3 * x*y - x*y", ("x", "y"))
    assert p.terms == {(1, 1): GaussRat(Fraction(-2, 3), Fraction(2, 3))}


@pytest.mark.parametrize("bad", ["x0^", "x0 + + ", "x9", "x0^-1", "(x0", "x0^4 / x1"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_poly(bad, X4)


def test_render_parse_round_trip(rng):
    for _ in range(20):
        p = random_poly(rng, 3, 3)
        assert parse_poly(p.render(("a", "b", "c")), ("a", "b", "c")) == p


def test_parse_gaussrat():
    assert parse_gaussrat("1/2-3*i") == GaussRat(Fraction(1, 2), -3)


# -- ring laws ----------------------------------------------------------------

exponents = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exponents, gaussrats, max_size=5).map(lambda t: MultiPoly(3, t))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p
    assert p * q == q * p
    assert p - p == MultiPoly.zero(3)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_product_matches_sympy(p, q):
    s = sp.symbols("a b c")
    assert sp.expand(to_sympy(p * q, s) - to_sympy(p, s) * to_sympy(q, s)) == 0


# -- derivatives, evaluation, homogeneity -------------------------------------------


def test_partial_examples():
    f = parse_poly(FERMAT, X4)
    assert partial_derivative(parse_poly("x0^4", X4), 0) == parse_poly("4*x0^3", X4)
    assert partial_derivative(parse_poly("7+3i", X4), 2).is_zero()
    assert partial_derivative(f, 2) == parse_poly("4*x2^3", X4)


def test_evaluation_examples():
    f = parse_poly(FERMAT, X4)
    assert evaluate_exact(f, [1, 0, 0, 0]) == GaussRat(1)
    assert evaluate_exact(f, [1, I, 1, I]) == GaussRat(4)
    w = np.exp(1j * np.pi / 4)
    assert abs(evaluate_num(f, [1, w, 0, 0])) <= 1e-14


def test_homogeneity_examples():
    assert check_homogeneous(parse_poly(FERMAT, X4), 4)
    assert not check_homogeneous(parse_poly("x0^4+x1^3", X4), 4)
    assert check_homogeneous(MultiPoly.zero(4), 7)


def test_dehomogenize_examples():
    f = parse_poly(FERMAT, X4)
    assert dehomogenize(f, 0) == parse_poly("1+z1^4+z2^4+z3^4", ("z1", "z2", "z3"))
    assert dehomogenize(parse_poly("x0*x1^3", X4), 1) == parse_poly("y0", ("y0", "y2", "y3"))


def test_homogenize_round_trip(rng):
    for _ in range(20):
        f = random_poly(rng, 4, 4, homogeneous=4)
        f = f + parse_poly("x1^4", X4)  # a term free of x0
        assert homogenize(dehomogenize(f, 0), 0, 4) == f


# -- gcd ----------------------------------------------------------------------------

XYZ = ("x", "y", "z")


def test_gcd_examples():
    P = lambda s: parse_poly(s, XYZ)
    assert gcd_poly(P("x*y"), P("x*z")) == P("x")
    assert gcd_poly(P("y^3"), P("z^3")).is_constant()


def test_gcd_recovers_planted_factor(rng):
    s = sp.symbols("x y z")
    for _ in range(10):
        p, q, r = (random_poly(rng, 3, 2, density=0.6) for _ in range(3))
        if r.total_degree() < 1 or p.is_zero() or q.is_zero():
            continue
        g = gcd_poly(p * r, q * r)
        assert divides(r, g)
        oracle = sp.gcd(to_sympy(p * r, s), to_sympy(q * r, s))
        assert sp.Poly(oracle, *s, domain="QQ_I").total_degree() == g.total_degree()


def test_gcd_many_of_fermat_slice_partials():
    P = lambda s: parse_poly(s, XYZ)
    assert gcd_many([P("4*y^3"), P("4*z^3")]).is_constant()


def test_squarefree_part():
    P = lambda s: parse_poly(s, XYZ)
    assert squarefree_part(P("x^3*(y-z)^2")) == P("x*(y-z)").monic()


# -- resultants -----------------------------------------------------------------------


def test_resultant_linear_factors():
    names = ("a", "b", "y")
    p, q = parse_poly("y-a", names), parse_poly("y-b", names)
    # Sylvester determinant |1 -a; 1 -b| = a - b
    assert resultant(p, q, 2) == parse_poly("a-b", names)


def test_resultant_shared_factor_vanishes():
    names = ("x", "y")
    p = parse_poly("y^2-x", names)
    s = parse_poly("x*y+3", names)
    assert resultant(p, p * s, 1).is_zero()


def test_resultant_y2_minus_x_and_y():
    names = ("x", "y")
    r = resultant(parse_poly("y^2-x", names), parse_poly("y", names), 1)
    assert r in (parse_poly("x", names), parse_poly("-x", names))


def test_resultant_matches_sylvester_determinant(rng):
    s = sp.symbols("x y z")
    for _ in range(12):
        p = random_poly(rng, 3, 3, density=0.4)
        q = random_poly(rng, 3, 3, density=0.4)
        if p.degree_in(2) < 1 or q.degree_in(2) < 1:
            continue
        M = sp.Matrix([[to_sympy(e, s) for e in row] for row in sylvester_matrix(p, q, 2)])
        oracle = from_sympy(M.det(method="berkowitz"), s)
        assert resultant(p, q, 2) == oracle


def test_resultant_matches_sympy_up_to_sign(rng):
    s = sp.symbols("x y z")
    for _ in range(8):
        p = random_poly(rng, 3, 2, density=0.6)
        q = random_poly(rng, 3, 3, density=0.4)
        if p.degree_in(1) < 1 or q.degree_in(1) < 1:
            continue
        ours = to_sympy(resultant(p, q, 1), s)
        theirs = sp.resultant(to_sympy(p, s), to_sympy(q, s), s[1])
        assert sp.expand(ours - theirs) == 0 or sp.expand(ours + theirs) == 0


# -- univariate roots ---------------------------------------------------------------


def _roots(text):
    return univariate_roots(parse_poly(text, ("z",)))


def test_roots_of_unity():
    roots = _roots("z^4-1")
    assert sorted(k for _, k in roots) == [1, 1, 1, 1]
    for target in (1, -1, 1j, -1j):
        assert min(abs(r - target) for r, _ in roots) < 1e-12


def test_triple_root_at_zero():
    assert _roots("z^3") == [(0j, 3)]


def test_roots_with_multiplicity():
    p = parse_poly("(z-2)^2*(z+1)", ("z",))
    roots = univariate_roots(p)
    by_mult = {k: r for r, k in roots}
    assert abs(by_mult[2] - 2) <= 1e-10 and abs(by_mult[1] + 1) <= 1e-10
    assert sum(k for _, k in roots) == 3


def test_roots_against_numpy(rng):
    for _ in range(10):
        p = random_poly(rng, 1, 6, density=0.8)
        if p.total_degree() < 1:
            continue
        ours = univariate_roots(p)
        coeffs = [complex(p.terms.get((k,), GaussRat(0))) for k in range(p.total_degree(), -1, -1)]
        for r in np.roots(coeffs):
            assert min(abs(r - o) for o, _ in ours) < 1e-6
