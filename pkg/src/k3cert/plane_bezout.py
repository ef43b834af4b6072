"""Plane projective curves: common components, Bezout intersections and the
C, D, E curves cut out of a quartic by a slice x1 = sigma * x0.

Intersections are computed after a random integer change of coordinates that
puts the curves in general position: [0:0:1] lies on neither curve, so both
are monic-up-to-a-constant in the last variable, and no two intersection
points share a projection [x:y]. Then Res_z(C, D) is a binary form of degree
n*m whose root multiplicities are the intersection multiplicities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactpoly import (
    GaussRat,
    MultiPoly,
    as_gaussrat,
    check_homogeneous,
    evaluate_exact,
    gcd_many,
    gcd_poly,
    homogenize,
    linear_form,
    parse_poly,
    partial_derivative,
    resultant,
    univariate_roots,
)
from .projective import ProjPoint
from .quartic_surface import HOMOGENEOUS_VARS, exact_det, singular_residual

log = logging.getLogger(__name__)

__all__ = [
    "PlaneCurve",
    "IntersectionReport",
    "GenericityError",
    "common_component",
    "intersect",
    "curve_residual",
    "CDE",
    "build_CDE",
    "Finite",
    "Case1Witness",
    "cde_finiteness",
    "OMEGA",
    "snap_sigma",
    "CDE_NAMES",
    "quartic_from_text",
]

POINT_RESIDUAL_TOL = 1e-8
CLUSTER_TOL = 1e-3
SNAP_TOL = 1e-12
OMEGA = complex(np.exp(1j * np.pi / 4))


class GenericityError(RuntimeError):
    """No coordinate change produced general position within the retry budget."""


@dataclass(frozen=True)
class PlaneCurve:
    poly: MultiPoly
    names: tuple[str, str, str] = ("x", "y", "z")

    def __post_init__(self):
        p = self.poly
        if p.nvars != 3 or p.is_zero():
            raise ValueError("a plane curve needs a nonzero polynomial in 3 variables")
        if p.total_degree() < 1 or not check_homogeneous(p, p.total_degree()):
            raise ValueError("a plane curve needs a homogeneous polynomial of degree >= 1")

    @classmethod
    def from_text(cls, text: str, names: Sequence[str] = ("x", "y", "z")) -> "PlaneCurve":
        return cls(parse_poly(text, names), tuple(names))

    @property
    def degree(self) -> int:
        return self.poly.total_degree()

    def __str__(self) -> str:
        return self.poly.render(self.names)


def curve_residual(poly: MultiPoly, x) -> float:
    """|p(x)| / sum|coeff| with x scaled to max-modulus 1."""
    x = np.asarray(x, dtype=np.complex128)
    x = x / np.abs(x).max()
    num = poly.to_numeric()
    s = num.abs_coeff_sum()
    return abs(num(x)) / s if s else 0.0


def common_component(C: PlaneCurve, D: PlaneCurve) -> PlaneCurve | None:
    g = gcd_poly(C.poly, D.poly)
    return None if g.is_constant() else PlaneCurve(g, C.names)


@dataclass(frozen=True)
class IntersectionReport:
    points: list[tuple[ProjPoint, int]]
    total: int
    degrees: tuple[int, int]
    common_component: PlaneCurve | None = None
    coordinate_change_used: list[list[int]] | None = None
    residuals: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        from .projective import point_to_json

        return {
            "points": [
                {**point_to_json(p), "exact": p.exact, "multiplicity": k, "residual": r}
                for (p, k), r in zip(self.points, self.residuals)
            ],
            "total": self.total,
            "degrees": list(self.degrees),
            "bezout_number": self.degrees[0] * self.degrees[1],
            "common_component": None if self.common_component is None else str(self.common_component),
            "coordinate_change_used": self.coordinate_change_used,
        }


def _apply(p: MultiPoly, m: Sequence[Sequence[int]]) -> MultiPoly:
    return p.compose([linear_form(row) for row in m])


def _z_coeffs(p: MultiPoly, x: complex, y: complex) -> np.ndarray:
    """Numeric coefficients (low -> high) of p(x, y, z) in z."""
    out = np.zeros(p.degree_in(2) + 1, dtype=np.complex128)
    for (a, b, c), coef in p.terms.items():
        out[c] += complex(coef) * x**a * y**b
    return out


def _clusters(roots: np.ndarray) -> list[tuple[complex, int]]:
    """Group numerically coincident roots; centroids of multiple roots are accurate."""
    groups: list[list[complex]] = []
    for r in roots:
        for g in groups:
            c = np.mean(g)
            if abs(r - c) <= CLUSTER_TOL * max(1.0, abs(c)):
                g.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _common_z(C: MultiPoly, D: MultiPoly, x: complex, y: complex) -> list[complex]:
    out = []
    cc = _z_coeffs(C, x, y)
    dc = _z_coeffs(D, x, y)
    rc = _clusters(np.roots(cc[::-1])) if len(cc) > 1 else []
    rd = _clusters(np.roots(dc[::-1])) if len(dc) > 1 else []
    for zc, _ in rc:
        for zd, _ in rd:
            if abs(zc - zd) <= CLUSTER_TOL * max(1.0, abs(zc)):
                out.append((zc + zd) / 2)
                break
    return out


def _polish(C: MultiPoly, D: MultiPoly, x: np.ndarray) -> np.ndarray:
    """Gauss-Newton on (C, D) in the max-modulus chart; keeps only improvements."""
    polys = [C, D]
    grads = [[partial_derivative(p, k).to_numeric() for k in range(3)] for p in polys]
    nums = [p.to_numeric() for p in polys]

    def res(v):
        return max(curve_residual(p, v) for p in polys)

    best, best_r = x, res(x)
    for _ in range(8):
        c = int(np.argmax(np.abs(best)))
        free = [k for k in range(3) if k != c]
        vals = np.array([n(best) for n in nums])
        jac = np.array([[grads[i][k](best) for k in free] for i in range(2)])
        try:
            step = np.linalg.solve(jac, -vals)
        except np.linalg.LinAlgError:
            break
        cand = best.copy()
        cand[free] += step
        r = res(cand)
        if not r < best_r:
            break
        best, best_r = cand, r
    return best


def _rationalize(x: np.ndarray, polys: Sequence[MultiPoly], max_den: int = 10_000) -> ProjPoint | None:
    x = x / x[int(np.argmax(np.abs(x)))]
    coords = []
    for v in x:
        re = Fraction(v.real).limit_denominator(max_den)
        im = Fraction(v.imag).limit_denominator(max_den)
        if abs(float(re) - v.real) > 1e-9 or abs(float(im) - v.imag) > 1e-9:
            return None
        coords.append(GaussRat(re, im))
    p = ProjPoint(coords)
    if all(evaluate_exact(q, list(p.coords)).is_zero() for q in polys):
        return p
    return None


def _random_change(rng: np.random.Generator, bound: int = 10) -> list[list[int]]:
    while True:
        m = rng.integers(-bound, bound + 1, size=(3, 3)).tolist()
        if exact_det(m) != 0:
            return m


class _NotGeneric(Exception):
    pass


def _intersect_in_position(C: MultiPoly, D: MultiPoly, n: int, m: int):
    """Intersection points of C, D assumed in general position, in the changed coordinates."""
    lc_c = C.coeffs_in(2)
    lc_d = D.coeffs_in(2)
    if len(lc_c) != n + 1 or len(lc_d) != m + 1 or not lc_c[-1].is_constant() or not lc_d[-1].is_constant():
        raise _NotGeneric("[0:0:1] lies on a curve")
    R = resultant(C, D, 2)
    if R.is_zero() or not check_homogeneous(R, n * m):
        raise _NotGeneric("resultant is not a binary form of degree n*m")
    affine = R.substitute({1: 1})  # R(t, 1, .)
    deg_t = max(affine.degree_in(0), 0)
    found = []
    if deg_t > 0:
        for t, k in univariate_roots(affine):
            found.append((np.array([t, 1, 0], dtype=np.complex128), k))
    if deg_t < n * m:
        found.append((np.array([1, 0, 0], dtype=np.complex128), n * m - deg_t))
    points = []
    for base, k in found:
        zs = _common_z(C, D, base[0], base[1])
        if len(zs) != 1:
            raise _NotGeneric(f"{len(zs)} common z-values above one root of the resultant")
        pt = base.copy()
        pt[2] = zs[0]
        points.append((pt, k))
    return points


def intersect(C: PlaneCurve, D: PlaneCurve, seed: int = 0, try_identity: bool = True, max_changes: int = 10) -> IntersectionReport:
    """All intersection points of two curves without common component, with multiplicities."""
    if common_component(C, D) is not None:
        raise ValueError("curves share a component; the intersection is infinite")
    n, m = C.degree, D.degree
    rng = np.random.default_rng(seed)
    reasons = []
    for attempt in range(max_changes):
        M = [[1, 0, 0], [0, 1, 0], [0, 0, 1]] if (attempt == 0 and try_identity) else _random_change(rng)
        Cm, Dm = _apply(C.poly, M), _apply(D.poly, M)
        try:
            local = _intersect_in_position(Cm, Dm, n, m)
        except _NotGeneric as exc:
            reasons.append(str(exc))
            continue
        Mn = np.array(M, dtype=float)
        points, residuals = [], []
        ok = True
        for pt, k in local:
            x = _polish(C.poly, D.poly, Mn @ pt)
            r = max(curve_residual(C.poly, x), curve_residual(D.poly, x))
            if r > POINT_RESIDUAL_TOL:
                ok = False
                reasons.append(f"point residual {r:.2e} above tolerance")
                break
            exact = _rationalize(x, (C.poly, D.poly))
            if exact is not None:
                points.append((exact.normalize(), k))
                residuals.append(0.0)
            else:
                points.append((ProjPoint(list(x)).normalize(), k))
                residuals.append(float(r))
        if not ok:
            continue
        total = sum(k for _, k in points)
        if total != n * m:
            raise AssertionError(f"multiplicities sum to {total}, expected {n * m}")
        used = None if M == [[1, 0, 0], [0, 1, 0], [0, 0, 1]] else M
        return IntersectionReport(points, total, (n, m), None, used, residuals)
    raise GenericityError(f"no general position after {max_changes} coordinate changes: " + "; ".join(reasons[-3:]))


# -- the slice curves -------------------------------------------------------------

CDE_NAMES = ("u", "z2", "z3")


def snap_sigma(sigma) -> tuple[GaussRat, bool]:
    """Exact value for sigma; returns (value, numeric_origin).

    Accepts a GaussRat/int/Fraction/str (exact), a Python complex/float
    (converted to its exact binary value) or the keyword "omega" for e^{i pi/4}.
    """
    if isinstance(sigma, str):
        if sigma.strip().lower() in ("omega", "w", "e^(i*pi/4)"):
            return GaussRat.from_complex(OMEGA), True
        return as_gaussrat(sigma), False
    if isinstance(sigma, (complex, float, np.complexfloating, np.floating)):
        return GaussRat.from_complex(complex(sigma)), True
    return as_gaussrat(sigma), False


def _snap_coeffs(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    big = max(abs(complex(c)) for c in p.terms.values())
    return MultiPoly(p.nvars, {e: c for e, c in p.terms.items() if abs(complex(c)) > SNAP_TOL * big})


@dataclass(frozen=True)
class CDE:
    sigma: GaussRat
    numeric_sigma: bool
    C: MultiPoly  # homogeneous in (u, z2, z3), possibly zero or constant
    D: MultiPoly
    E: MultiPoly
    F1: MultiPoly  # slice of the x1-partial
    degrees: tuple[int, int, int]

    def curve(self, which: str) -> PlaneCurve:
        return PlaneCurve(getattr(self, which), CDE_NAMES)


def _slice(p: MultiPoly, sigma: GaussRat) -> MultiPoly:
    """p(1, sigma, z2, z3) as a polynomial in (z2, z3)."""
    return p.substitute({0: 1, 1: sigma}).select_vars([2, 3])


def _homog(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return MultiPoly.zero(3)
    return homogenize(p, 0, max(p.total_degree(), 0))


def build_CDE(f: MultiPoly, sigma) -> CDE:
    """C, D, E (and the x1-partial slice) for the slice x1 = sigma * x0.

    Each curve is homogenised to its actual degree in [u : z2 : z3]; the
    degrees are reported. A numeric sigma is replaced by its exact binary value
    and coefficients below 1e-12 of the largest are dropped.
    """
    if f.nvars != 4 or not check_homogeneous(f, 4):
        raise ValueError("build_CDE needs a homogeneous quartic in 4 variables")
    s, numeric = snap_sigma(sigma)
    g = _slice(f, s)
    if numeric:
        g = _snap_coeffs(g)
    if g.is_zero():
        raise ValueError("the slice lies inside the surface (g is identically zero)")
    g2 = partial_derivative(g, 0)
    g3 = partial_derivative(g, 1)
    f1 = _slice(partial_derivative(f, 1), s)
    if numeric:
        g2, g3, f1 = _snap_coeffs(g2), _snap_coeffs(g3), _snap_coeffs(f1)
    C, D, E, F1 = (_homog(p) for p in (g, g2, g3, f1))
    degs = tuple(p.total_degree() for p in (C, D, E))
    return CDE(s, numeric, C, D, E, F1, degs)


@dataclass(frozen=True)
class Finite:
    points: list[tuple[ProjPoint, int]]
    case: int  # 2 or 3
    pair: tuple[str, str] | None
    residuals: list[float]
    shared: list[tuple[str, str]]
    kind: str = "finite"


@dataclass(frozen=True)
class Case1Witness:
    common_factor: MultiPoly
    witness: ProjPoint | None  # a singular point of the quartic, when one verifies
    verified: bool
    residual: float | None
    kind: str = "case1"


def _verify_singular(f: MultiPoly, x: np.ndarray):
    from .quartic_surface import QuarticSurface, _exact_singular, _rationalize as _rat4

    X = QuarticSurface(f)
    exact = _rat4(x)
    if exact is not None:
        p = ProjPoint(exact)
        if _exact_singular(X, p):
            return p, 0.0
    r = singular_residual(X, x)
    if r <= 1e-10:
        return ProjPoint(list(x)), r
    return None


def _candidates_on(P: MultiPoly, other: MultiPoly | None, seed: int) -> list[np.ndarray]:
    """Points of the curve P meeting ``other`` (if a curve) and the line u = 0."""
    pts = []
    curveP = PlaneCurve(P, CDE_NAMES)
    targets = []
    if other is not None and not other.is_zero() and other.total_degree() >= 1:
        targets.append(other)
    targets.append(MultiPoly.var(3, 0))  # u = 0
    for T in targets:
        if common_component(curveP, PlaneCurve(T, CDE_NAMES)) is not None:
            continue
        rep = intersect(curveP, PlaneCurve(T, CDE_NAMES), seed=seed)
        pts.extend(p.numeric() for p, _ in rep.points)
    return pts


def cde_finiteness(f: MultiPoly, sigma, seed: int = 0) -> Finite | Case1Witness:
    """Case analysis on the common components of C, D and E.

    Case 1 (all three share a factor P) is turned into a singular point of f:
    a point [u : b : c] of P on the x1-partial slice, or at u = 0, maps to
    [u : sigma*u : b : c] and is checked against f and its four partials.
    Otherwise one coprime pair is intersected and the points are filtered by
    the third curve.
    """
    cde = build_CDE(f, sigma)
    polys = {"C": cde.C, "D": cde.D, "E": cde.E}
    nonzero = [p for p in polys.values() if not p.is_zero()]
    P = gcd_many(nonzero)
    if not P.is_constant():
        witness, res = None, None
        sig = complex(cde.sigma)
        for pt in _candidates_on(P, cde.F1, seed):
            x = np.array([pt[0], sig * pt[0], pt[1], pt[2]], dtype=np.complex128)
            got = _verify_singular(f, x)
            if got is not None:
                witness, res = got
                break
        return Case1Witness(P, witness, witness is not None, res)

    names = ["C", "D", "E"]
    shared = []
    coprime = []
    for i in range(3):
        for j in range(i + 1, 3):
            a, b = polys[names[i]], polys[names[j]]
            if a.is_zero() or b.is_zero():
                shared.append((names[i], names[j]))
                continue
            if not gcd_poly(a, b).is_constant():
                shared.append((names[i], names[j]))
            else:
                coprime.append((names[i], names[j]))
    case = 2 if shared else 3
    # a nonzero constant among C, D, E means an empty curve
    if any(p.is_constant() and not p.is_zero() for p in polys.values()):
        return Finite([], case, None, [], shared)
    if not coprime:
        raise ArithmeticError("no coprime pair among C, D, E outside Case 1")
    pair = min(coprime, key=lambda ab: polys[ab[0]].total_degree() * polys[ab[1]].total_degree())
    third = next(n for n in names if n not in pair)
    rep = intersect(PlaneCurve(polys[pair[0]], CDE_NAMES), PlaneCurve(polys[pair[1]], CDE_NAMES), seed=seed)
    T = polys[third]
    kept, residuals = [], []
    for p, k in rep.points:
        if p.exact:
            if T.is_zero() or evaluate_exact(T, list(p.coords)).is_zero():
                kept.append((p, k))
                residuals.append(0.0)
            continue
        r = 0.0 if T.is_zero() else curve_residual(T, p.numeric())
        if r <= POINT_RESIDUAL_TOL:
            kept.append((p, k))
            residuals.append(float(r))
    return Finite(kept, case, pair, residuals, shared)


def quartic_from_text(text: str) -> MultiPoly:
    return parse_poly(text, HOMOGENEOUS_VARS)
