from fractions import Fraction

import pytest
import sympy as sp

from k3cert.exactpoly import GaussRat, evaluate_exact, parse_poly
from k3cert.plane_bezout import (
    CDE_NAMES,
    OMEGA,
    Case1Witness,
    Finite,
    PlaneCurve,
    build_CDE,
    cde_finiteness,
    common_component,
    curve_residual,
    intersect,
    quartic_from_text,
)
from k3cert.projective import ProjPoint
from k3cert.quartic_surface import QuarticSurface, singular_residual
from oracles import random_poly, to_sympy

FERMAT = quartic_from_text("x0^4+x1^4+x2^4+x3^4")
C_ = lambda s: PlaneCurve.from_text(s)


def _random_curve(rng, d):
    while True:
        p = random_poly(rng, 3, d, density=0.7, homogeneous=d)
        if p.total_degree() == d:
            return PlaneCurve(p)


def _coprime_pairs(rng, count):
    out = []
    while len(out) < count:
        n, m = (int(v) for v in rng.integers(1, 5, size=2))
        C, D = _random_curve(rng, n), _random_curve(rng, m)
        if common_component(C, D) is None:
            out.append((C, D))
    return out


# -- common components --------------------------------------------------------------


def test_shared_line_detected():
    L = "(x+2*y-3*i*z)"
    got = common_component(C_(f"x*{L}"), C_(f"y*{L}"))
    assert got is not None and got.poly.monic() == C_(L).poly.monic()


def test_fermat_slice_partials_coprime():
    assert common_component(PlaneCurve(parse_poly("4*z2^3", CDE_NAMES), CDE_NAMES), PlaneCurve(parse_poly("4*z3^3", CDE_NAMES), CDE_NAMES)) is None


def test_random_pairs_coprime_against_sympy(rng):
    s = sp.symbols("x y z")
    for C, D in _coprime_pairs(rng, 20):
        g = sp.gcd(to_sympy(C.poly, s), to_sympy(D.poly, s))
        assert sp.Poly(g, *s, domain="QQ_I").total_degree() == 0


# -- intersections ------------------------------------------------------------------


def test_two_lines():
    r = intersect(C_("x"), C_("y"))
    assert r.total == 1 and r.points == [(ProjPoint([0, 0, 1]), 1)]


def test_conic_tangent_to_line():
    r = intersect(C_("y*z-x^2"), C_("y"))
    assert r.total == 2
    assert len(r.points) == 1 and r.points[0][0] == ProjPoint([0, 0, 1]) and r.points[0][1] == 2
    # oracle: eliminating y leaves -x^2, a double root at x = 0
    x, y, z = sp.symbols("x y z")
    res = sp.resultant(y * z - x**2, y, y)
    assert sp.roots(sp.Poly(res.subs(z, 1), x)) == {0: 2}


def test_monomial_cubes():
    names = CDE_NAMES
    r = intersect(PlaneCurve(parse_poly("z2^3", names), names), PlaneCurve(parse_poly("z3^3", names), names))
    assert r.points == [(ProjPoint([1, 0, 0]), 9)] and r.total == 9


def test_random_pairs_bezout_count(rng):
    for C, D in _coprime_pairs(rng, 20):
        r = intersect(C, D, seed=1)
        nm = C.degree * D.degree
        assert r.total == nm == sum(k for _, k in r.points)
        for p, _ in r.points:
            x = p.numeric()
            assert curve_residual(C.poly, x) <= 1e-8 and curve_residual(D.poly, x) <= 1e-8


def test_points_independent_of_coordinate_change(rng):
    for C, D in _coprime_pairs(rng, 6):
        a = intersect(C, D, seed=0, try_identity=True)
        b = intersect(C, D, seed=9, try_identity=False)
        assert sorted(k for _, k in a.points) == sorted(k for _, k in b.points)
        for p, k in a.points:
            assert any(p == q and k == l for q, l in b.points)


def test_planted_multiplicity(rng):
    # x + y = z meets the double line y = 2x at [1:2:3] and the line z = 0 at [1:-1:0]
    r = intersect(C_("(y-2*x)^2*z"), C_("x+y-z"))
    got = {k: p for p, k in r.points}
    assert r.total == 3 and sorted(got) == [1, 2]
    assert got[2] == ProjPoint([1, 2, 3]) and got[1] == ProjPoint([1, -1, 0])
    # all three at one point when the line passes through [1:2:0]
    assert intersect(C_("(y-2*x)^2*z"), C_("y-2*x+3*z")).points == [(ProjPoint([1, 2, 0]), 3)]


def test_rejects_non_homogeneous():
    with pytest.raises(ValueError):
        C_("x^2+y")


# -- the slice curves C, D, E -------------------------------------------------------------


def test_cde_fermat_sigma_one():
    cde = build_CDE(FERMAT, 1)
    P = lambda s: parse_poly(s, CDE_NAMES)
    assert cde.C == P("2*u^4+z2^4+z3^4")
    assert cde.D == P("4*z2^3") and cde.E == P("4*z3^3")
    assert cde.degrees == (4, 3, 3)


def test_cde_degree_drop_reported():
    f = quartic_from_text("x0^4+x1^4+x2^4+x3^4+x2^3*x0")
    assert build_CDE(f, 1).degrees == (4, 3, 3)
    g = quartic_from_text("x0^3*x2+x1^3*x3+x1^4")
    # x3 appears only through x1^3 x3, so E is constant after slicing
    assert build_CDE(g, 1).degrees[2] == 0


def test_slice_derivative_commutes(rng):
    xs = sp.symbols("x0:4")
    u, z2, z3 = sp.symbols("u z2 z3")
    for _ in range(5):
        f = random_poly(rng, 4, 4, density=0.5, homogeneous=4)
        sigma = GaussRat(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        cde = build_CDE(f, sigma)
        s_sym = sp.Integer(int(sigma.re)) + sp.I * int(sigma.im)
        fz2 = sp.diff(to_sympy(f, xs), xs[2]).subs({xs[0]: 1, xs[1]: s_sym, xs[2]: z2, xs[3]: z3})
        ours = to_sympy(cde.D, (u, z2, z3)).subs(u, 1)
        assert sp.expand(ours - fz2) == 0


def test_fermat_random_sigma_is_empty(rng):
    for _ in range(10):
        den = int(rng.integers(1, 8))
        sigma = GaussRat(Fraction(int(rng.integers(-20, 21)), den), Fraction(int(rng.integers(-20, 21)), den))
        assert not (1 + sigma**4).is_zero()
        v = cde_finiteness(FERMAT, sigma)
        assert isinstance(v, Finite) and v.points == []


def test_fermat_omega_slice():
    for sigma in ("omega", OMEGA):
        v = cde_finiteness(FERMAT, sigma)
        assert isinstance(v, Finite)
        assert [p for p, _ in v.points] == [ProjPoint([1, 0, 0])]
        assert max(v.residuals) <= 1e-8


def test_case1_on_singular_quartic():
    f = quartic_from_text("x0^4+x1^4+x2^4")
    v = cde_finiteness(f, "omega")
    assert isinstance(v, Case1Witness) and v.verified
    X = QuarticSurface(f)
    w = v.witness
    if w.exact:
        assert all(evaluate_exact(g, list(w.coords)).is_zero() for g in (f, *X.partials))
    else:
        assert singular_residual(X, w.numeric()) <= 1e-10


def test_no_case1_on_certified_quartics(rng):
    from k3cert.quartic_surface import certify_nonsingular

    for text in ("x0^4+x1^4+x2^4+x3^4", "x0^4+2*x1^4+3*x2^4+5*x3^4", "x0^3*x1+x1^4+x2^4+x3^4"):
        X = QuarticSurface.from_text(text)
        assert certify_nonsingular(X).kind == "certified-nonsingular"
        for _ in range(5):
            sigma = GaussRat(int(rng.integers(-9, 10)), int(rng.integers(-9, 10))) / int(rng.integers(1, 5))
            assert isinstance(cde_finiteness(X.f, sigma), Finite)
