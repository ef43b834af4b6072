"""The quartic surface X = {f = 0} in CP^3.

Nonsingularity is certified chart by chart. On chart ``c`` the dehomogenised
polynomial and its three partials have a common zero exactly at the singular
points of X inside that chart (Euler's identity recovers the missing partial).
Variables are eliminated with resultants, last variable first; every resultant
lies in the ideal of the system, so a nonzero constant (or coprime univariate
polynomials) at the bottom proves the chart is clean. Surviving candidates are
back-substituted numerically and re-verified against all five polynomials.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .exactpoly import (
    GaussRat,
    MultiPoly,
    ZERO,
    check_homogeneous,
    dehomogenize,
    evaluate_exact,
    gcd_many,
    linear_form,
    parse_poly,
    partial_derivative,
    resultant,
    squarefree_part,
    univariate_roots,
)
from .exactpoly.multipoly import NumPoly
from .projective import ProjPoint, chart_indices

log = logging.getLogger(__name__)

__all__ = [
    "HOMOGENEOUS_VARS",
    "QuarticSurface",
    "SingularityStatus",
    "SurfacePointNum",
    "TangentFrame",
    "SingularPointError",
    "contains",
    "certify_nonsingular",
    "sample_points",
    "tangent_frame",
    "relative_residual",
    "singular_residual",
    "random_linear_change",
]

HOMOGENEOUS_VARS = ("x0", "x1", "x2", "x3")
SAMPLE_RESIDUAL_TOL = 1e-10
FRAME_PARTIAL_FLOOR = 1e-12
FRAME_TOL = 1e-10


class SingularPointError(ValueError):
    """All chart-local partials vanish (numerically) at the point."""


@dataclass(frozen=True)
class SingularityStatus:
    kind: str  # unchecked | certified-nonsingular | singular | inconclusive
    witness: ProjPoint | None = None
    reason: str = ""
    charts_checked: tuple[int, ...] = ()
    coordinate_changes: int = 0
    witness_residual: float | None = None

    def to_json(self) -> dict:
        from .projective import point_to_json

        out = {"status": self.kind, "charts_checked": list(self.charts_checked)}
        if self.witness is not None:
            out["witness"] = point_to_json(self.witness)
            out["witness_exact"] = self.witness.exact
            if self.witness_residual is not None:
                out["witness_residual"] = self.witness_residual
        if self.reason:
            out["reason"] = self.reason
        out["coordinate_changes"] = self.coordinate_changes
        return out


UNCHECKED = SingularityStatus("unchecked")


@dataclass(frozen=True)
class QuarticSurface:
    f: MultiPoly
    status: SingularityStatus = UNCHECKED

    def __post_init__(self):
        if self.f.nvars != 4 or self.f.is_zero() or not check_homogeneous(self.f, 4):
            raise ValueError("a quartic surface needs a nonzero homogeneous quartic in x0..x3")

    @classmethod
    def from_text(cls, text: str) -> "QuarticSurface":
        return cls(parse_poly(text, HOMOGENEOUS_VARS))

    @classmethod
    def fermat(cls) -> "QuarticSurface":
        return cls.from_text("x0^4+x1^4+x2^4+x3^4")

    def certified(self) -> "QuarticSurface":
        """Copy carrying the result of :func:`certify_nonsingular`."""
        return replace(self, status=certify_nonsingular(self))

    # exact derived data
    @cached_property
    def partials(self) -> tuple[MultiPoly, ...]:
        return tuple(partial_derivative(self.f, k) for k in range(4))

    def chart_poly(self, chart: int) -> MultiPoly:
        return self._chart_polys[chart]

    @cached_property
    def _chart_polys(self) -> tuple[MultiPoly, ...]:
        return tuple(dehomogenize(self.f, c) for c in range(4))

    @cached_property
    def _chart_partials(self) -> tuple[tuple[MultiPoly, ...], ...]:
        return tuple(tuple(partial_derivative(p, k) for k in range(3)) for p in self._chart_polys)

    def chart_partials(self, chart: int) -> tuple[MultiPoly, ...]:
        return self._chart_partials[chart]

    # numeric evaluators
    @cached_property
    def f_num(self) -> NumPoly:
        return self.f.to_numeric()

    @cached_property
    def _partials_num(self) -> tuple[NumPoly, ...]:
        return tuple(p.to_numeric() for p in self.partials)

    @cached_property
    def _hessian_num(self) -> tuple[tuple[NumPoly, ...], ...]:
        return tuple(tuple(partial_derivative(p, k).to_numeric() for k in range(4)) for p in self.partials)

    @cached_property
    def _chart_num(self) -> tuple[tuple[NumPoly, tuple[NumPoly, ...]], ...]:
        return tuple(
            (self._chart_polys[c].to_numeric(), tuple(p.to_numeric() for p in self._chart_partials[c]))
            for c in range(4)
        )

    def chart_value(self, chart: int, u) -> complex:
        return self._chart_num[chart][0](np.asarray(u, dtype=np.complex128))

    def chart_gradient(self, chart: int, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.complex128)
        return np.array([g(u) for g in self._chart_num[chart][1]], dtype=np.complex128)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        return np.array([g(x) for g in self._partials_num], dtype=np.complex128)


# -- residuals -----------------------------------------------------------------


def _unit_scale(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    return x / np.abs(x).max()


def relative_residual(X: QuarticSurface, x) -> float:
    """|f(x)| / sum|coefficients| with x scaled to max-modulus 1."""
    x = _unit_scale(x)
    return abs(X.f_num(x)) / X.f_num.abs_coeff_sum()


def singular_residual(X: QuarticSurface, x) -> float:
    """Largest relative residual among f and its four partials."""
    x = _unit_scale(x)
    vals = [relative_residual(X, x)]
    for g in X._partials_num:
        s = g.abs_coeff_sum()
        vals.append(abs(g(x)) / s if s else 0.0)
    return float(max(vals))


def _exact_singular(X: QuarticSurface, p: ProjPoint) -> bool:
    pt = list(p.coords)
    return all(evaluate_exact(q, pt).is_zero() for q in (X.f, *X.partials))


# -- membership ----------------------------------------------------------------


def contains(X: QuarticSurface, p: ProjPoint, tol: float = SAMPLE_RESIDUAL_TOL) -> bool:
    if p.dim != 3:
        raise ValueError("expected a point of CP^3")
    if p.exact:
        return evaluate_exact(X.f, list(p.coords)).is_zero()
    return relative_residual(X, p.numeric()) <= tol


# -- certification -------------------------------------------------------------


class _Excess(Exception):
    pass


class _Unresolved(Exception):
    pass


class _OutOfTime(Exception):
    pass


def _check_deadline(deadline: float | None):
    if deadline is not None and time.monotonic() > deadline:
        raise _OutOfTime("time budget exhausted")


# square-free reduction pays off on small inputs (4*z3^3 -> z3) but its gcds
# dominate the cost on large resultants, where it is skipped
SQUAREFREE_MAX_DEGREE = 4


def _clean(polys: Sequence[MultiPoly]) -> list[MultiPoly]:
    seen = {}
    for p in polys:
        if p.is_zero():
            continue
        if p.is_constant():
            q = MultiPoly.one(p.nvars)
        elif p.total_degree() <= SQUAREFREE_MAX_DEGREE:
            q = squarefree_part(p).monic()
        else:
            q = p.monic()
        seen.setdefault(q, None)
    return sorted(seen, key=lambda q: (q.total_degree(), len(q)))


def _eliminate(system: list[MultiPoly], order: Sequence[int], deadline: float | None = None) -> list[list[MultiPoly]]:
    """Resultant elimination; returns the list of levels (level k has k variables removed)."""
    levels = [_clean(system)]
    for v in order[:-1]:
        cur = levels[-1]
        if any(p.is_constant() for p in cur):
            break
        with_v = [p for p in cur if p.degree_in(v) > 0]
        nxt = [p for p in cur if p.degree_in(v) <= 0]
        if len(with_v) >= 2:
            pivot = min(with_v, key=lambda p: (p.degree_in(v), len(p)))
            for q in with_v:
                if q is pivot:
                    continue
                _check_deadline(deadline)
                r = resultant(pivot, q, v)
                if r.is_zero():
                    raise _Excess(f"resultant in variable {v} vanishes identically")
                nxt.append(r)
        levels.append(_clean(nxt))
    return levels


def _spec_coeffs(p: MultiPoly, var: int, point: dict[int, complex]) -> tuple[np.ndarray, np.ndarray]:
    """Numeric coefficients (low -> high) in ``var`` after substituting ``point``,
    plus per-coefficient magnitude scales for zero tests."""
    deg = max(p.degree_in(var), 0)
    coeffs = np.zeros(deg + 1, dtype=np.complex128)
    scales = np.zeros(deg + 1)
    for e, c in p.terms.items():
        t = complex(c)
        for k, a in enumerate(e):
            if k != var and a:
                t *= point[k] ** a
        coeffs[e[var]] += t
        scales[e[var]] += abs(t)
    return coeffs, scales


def _common_roots(polys: Sequence[MultiPoly], var: int, point: dict[int, complex]) -> list[complex] | None:
    """Numeric common roots in ``var``; None when no polynomial constrains ``var``."""
    specs = []
    for p in polys:
        c, s = _spec_coeffs(p, var, point)
        c = np.where(np.abs(c) <= 1e-9 * max(s.max(), 1e-300), 0, c)
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            continue
        c = c[: nz[-1] + 1]
        specs.append(c)
    if not specs:
        return None
    if any(len(c) == 1 for c in specs):
        return []
    base = min(specs, key=len)
    roots = np.roots(base[::-1])
    out = []
    for r in roots:
        good = True
        for c in specs:
            bound = np.sum(np.abs(c) * np.abs(r) ** np.arange(len(c)))
            if abs(np.polyval(c[::-1], r)) > 1e-6 * bound:
                good = False
                break
        if good:
            out.append(complex(r))
    return out


def _back_substitute(levels: list[list[MultiPoly]], order: Sequence[int]) -> list[dict[int, complex]]:
    bottom_var = order[-1]
    bottom = levels[-1]
    if not bottom:
        raise _Unresolved("elimination produced no constraint")
    g = gcd_many(bottom)
    if g.is_constant():
        return []
    cands = [{bottom_var: r} for r, _ in univariate_roots(g)]
    for depth in range(len(levels) - 2, -1, -1):
        var = order[depth]
        nxt = []
        for pt in cands:
            roots = _common_roots(levels[depth], var, pt)
            if roots is None:
                raise _Unresolved(f"variable {var} unconstrained during back-substitution")
            for r in roots:
                nxt.append({**pt, var: r})
        cands = nxt
    return cands


def _polish_singular(X: QuarticSurface, x: np.ndarray, steps: int = 30) -> np.ndarray:
    """Gauss-Newton on (f, f_0..f_3) inside the max-modulus chart."""
    x = _unit_scale(x)
    c = int(np.argmax(np.abs(x)))
    free = [j for j in range(4) if j != c]
    best, best_res = x, singular_residual(X, x)
    for _ in range(steps):
        vals = np.concatenate([[X.f_num(x)], X.gradient(x)])
        jac = np.zeros((5, 3), dtype=np.complex128)
        grad = X.gradient(x)
        for col, j in enumerate(free):
            jac[0, col] = grad[j]
            for row in range(4):
                jac[row + 1, col] = X._hessian_num[row][j](x)
        step, *_ = np.linalg.lstsq(jac, -vals, rcond=None)
        x = x.copy()
        x[free] += step
        res = singular_residual(X, x)
        if res < best_res:
            best, best_res = x.copy(), res
        if res < 1e-15:
            break
    return best


def _rationalize(x: np.ndarray, max_den: int = 10_000) -> list[GaussRat] | None:
    x = _unit_scale(x)
    k = int(np.argmax(np.abs(x)))
    x = x / x[k]
    out = []
    for v in x:
        re = Fraction(v.real).limit_denominator(max_den)
        im = Fraction(v.imag).limit_denominator(max_den)
        if abs(float(re) - v.real) > 1e-9 or abs(float(im) - v.imag) > 1e-9:
            return None
        out.append(GaussRat(re, im))
    return out


def random_linear_change(rng: np.random.Generator, n: int = 4, bound: int = 3) -> list[list[int]]:
    """Random integer matrix with nonzero determinant (checked exactly)."""
    while True:
        m = rng.integers(-bound, bound + 1, size=(n, n)).tolist()
        if exact_det(m) != 0:
            return m


def exact_det(m: Sequence[Sequence[int]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(v) for v in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            t = a[r][col] / a[col][col]
            if t:
                a[r] = [x - t * y for x, y in zip(a[r], a[col])]
    return det


def _apply_change(f: MultiPoly, m: Sequence[Sequence[int]]) -> MultiPoly:
    images = [linear_form(row) for row in m]
    return f.compose(images)


def _verified_witness(X: QuarticSurface, x: np.ndarray):
    """Polish a candidate singular point; exact witness when it rationalises."""
    x = _polish_singular(X, x)
    res = singular_residual(X, x)
    if res > SAMPLE_RESIDUAL_TOL:
        return None
    exact = _rationalize(x)
    if exact is not None:
        p = ProjPoint(exact)
        if _exact_singular(X, p):
            return p, 0.0
    return ProjPoint(list(x)), res


def _point_on_common_factor(X: QuarticSurface, chart: int, g: MultiPoly, rng: np.random.Generator):
    """The whole system vanishes on {g = 0}: pick a point of it."""
    var = max(g.variables(), key=g.degree_in)
    idx = chart_indices(chart)
    for _ in range(10):
        values = {k: _random_gaussrat(rng) for k in range(3) if k != var}
        uni = g.substitute(values)
        if uni.is_constant():
            continue
        for r, _m in univariate_roots(uni):
            x = np.ones(4, dtype=np.complex128)
            for k, j in enumerate(idx):
                x[j] = r if k == var else complex(values[k])
            found = _verified_witness(X, x)
            if found is not None:
                return found
    return None


def _certify_once(
    X: QuarticSurface, rng: np.random.Generator, deadline: float | None
) -> tuple[str, ProjPoint | None, float | None, list[int]]:
    checked = []
    for chart in range(4):
        system = [X.chart_poly(chart), *X.chart_partials(chart)]
        common = gcd_many(system)
        if not common.is_constant():
            found = _point_on_common_factor(X, chart, common, rng)
            if found is not None:
                return "singular", found[0], found[1], checked + [chart]
            raise _Unresolved(f"chart {chart}: common factor without a verified point")
        levels = _eliminate(system, order=(2, 1, 0), deadline=deadline)
        checked.append(chart)
        bottom = levels[-1]
        if any(p.is_constant() for p in bottom):
            continue
        if len(levels) < 3:
            # elimination stopped early on a nonzero constant
            continue
        cands = _back_substitute(levels, order=(2, 1, 0))
        if not cands:
            continue
        idx = chart_indices(chart)
        for cand in cands:
            x = np.ones(4, dtype=np.complex128)
            for k, j in enumerate(idx):
                x[j] = cand[k]
            found = _verified_witness(X, x)
            if found is not None:
                return "singular", found[0], found[1], checked
        raise _Unresolved(f"chart {chart}: elimination candidates did not verify")
    return "certified-nonsingular", None, None, checked


def certify_nonsingular(
    X: QuarticSurface, seed: int = 0, max_changes: int = 5, budget_s: float | None = 300.0
) -> SingularityStatus:
    """Decide whether X is smooth; a singular verdict carries a verified witness.

    ``budget_s`` bounds the wall time (checked between resultants); running out
    yields ``inconclusive``. Pass None for no limit.
    """
    rng = np.random.default_rng(seed)
    deadline = None if budget_s is None else time.monotonic() + budget_s
    current = X
    change = None
    reasons = []
    for attempt in range(max_changes + 1):
        try:
            kind, witness, res, checked = _certify_once(current, rng, deadline)
        except _OutOfTime as exc:
            reasons.append(str(exc))
            return SingularityStatus("inconclusive", None, "; ".join(reasons), (), attempt)
        except (_Excess, _Unresolved) as exc:
            reasons.append(str(exc))
            log.info("certification attempt %d inconclusive: %s", attempt, exc)
            m = random_linear_change(rng)
            change = m if change is None else (np.array(change) @ np.array(m)).tolist()
            current = QuarticSurface(_apply_change(X.f, change))
            continue
        if witness is not None and change is not None:
            witness = _map_witness(X, change, witness)
            res = 0.0 if witness.exact else singular_residual(X, witness.numeric())
        return SingularityStatus(kind, witness, "", tuple(checked), attempt, res)
    return SingularityStatus("inconclusive", None, "; ".join(reasons), (), max_changes)


def _map_witness(X: QuarticSurface, m, w: ProjPoint) -> ProjPoint:
    if w.exact:
        coords = [sum((GaussRat(m[i][j]) * w.coords[j] for j in range(4)), ZERO) for i in range(4)]
        p = ProjPoint(coords)
        if _exact_singular(X, p):
            return p
    x = np.array(m, dtype=float) @ w.numeric()
    return ProjPoint(list(x))


# -- sampling ------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePointNum:
    coords: tuple[complex, ...]
    chart: int
    residual: float

    @property
    def x(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.complex128)

    def affine(self, chart: int | None = None) -> np.ndarray:
        c = self.chart if chart is None else chart
        x = self.x
        if abs(x[c]) == 0:
            raise ValueError(f"point not in chart {c}")
        return np.array([x[j] / x[c] for j in chart_indices(c)], dtype=np.complex128)


def _make_point(X: QuarticSurface, x: np.ndarray) -> SurfacePointNum:
    c = int(np.argmax(np.abs(x)))
    x = x / x[c]
    return SurfacePointNum(tuple(complex(v) for v in x), c, relative_residual(X, x))


def _random_gaussrat(rng: np.random.Generator, scale: float = 1.0) -> GaussRat:
    re, im = rng.normal(0, scale, size=2)
    return GaussRat(Fraction(int(round(re * 1024)), 1024), Fraction(int(round(im * 1024)), 1024))


def _newton_polish(X: QuarticSurface, x: np.ndarray, j: int, steps: int = 6) -> np.ndarray:
    x = x.copy()
    for _ in range(steps):
        val = X.f_num(x)
        der = X.gradient(x)[j]
        if der == 0:
            break
        cand = x.copy()
        cand[j] -= val / der
        if abs(X.f_num(cand)) >= abs(val):
            break
        x = cand
    return x


def sample_points(X: QuarticSurface, n: int, seed: int = 0) -> list[SurfacePointNum]:
    """Deterministic random points of X with residual <= 1e-10.

    Two affine coordinates of a random chart are fixed to random Gaussian
    rationals and the remaining univariate quartic is solved exactly-then-
    numerically, followed by Newton polishing.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    out: list[SurfacePointNum] = []
    failures = 0
    while len(out) < n:
        chart = int(rng.integers(4))
        solve = int(rng.integers(3))
        fixed = [k for k in range(3) if k != solve]
        values = {k: _random_gaussrat(rng) for k in fixed}
        uni = X.chart_poly(chart).substitute(values)
        pick = rng.random()
        if uni.is_constant():
            failures += 1
            if failures > 100:
                raise RuntimeError("too many degenerate slices while sampling")
            continue
        roots = univariate_roots(uni)
        r = roots[min(int(pick * len(roots)), len(roots) - 1)][0]
        idx = chart_indices(chart)
        x = np.ones(4, dtype=np.complex128)
        for k, j in enumerate(idx):
            x[j] = r if k == solve else complex(values[k])
        x = _newton_polish(X, x, idx[solve])
        pt = _make_point(X, x)
        if pt.residual > SAMPLE_RESIDUAL_TOL or not np.all(np.isfinite(pt.x)):
            failures += 1
            if failures > 100:
                raise RuntimeError("too many sampling failures")
            continue
        out.append(pt)
    return out


# -- tangent frame -------------------------------------------------------------


@dataclass(frozen=True)
class TangentFrame:
    base: SurfacePointNum
    chart: int
    pivot: int  # local index (0..2) of the partial in the denominator
    partials: np.ndarray = field(repr=False)
    V1: np.ndarray = field(repr=False)
    V2: np.ndarray = field(repr=False)
    phi1: np.ndarray = field(repr=False)
    phi2: np.ndarray = field(repr=False)
    alpha: float = 0.0
    theta1: float = 0.0

    @property
    def pivot_index(self) -> int:
        """Homogeneous index of the pivot variable."""
        return chart_indices(self.chart)[self.pivot]

    @property
    def others(self) -> tuple[int, int]:
        q, r = [k for k in range(3) if k != self.pivot]
        return q, r

    @property
    def f1abs(self) -> float:
        return float(abs(self.partials[self.pivot]))

    @property
    def S(self) -> float:
        """(|f_1|^2 + |f_2|^2 + |f_3|^2) / |f_pivot|^2."""
        return float(np.sum(np.abs(self.partials) ** 2) / abs(self.partials[self.pivot]) ** 2)


def tangent_frame(X: QuarticSurface, p: SurfacePointNum, chart: int | None = None) -> TangentFrame:
    """Tangent basis V1, V2 and dual coframe phi1, phi2 at ``p``.

    The pivot is the max-modulus chart partial; with pivot index p and the
    other indices q < r, ``V1 = e_q - (f_q/f_p) e_p`` and
    ``V2 = e_r - (f_r/f_p) e_p``.
    """
    c = p.chart if chart is None else chart
    u = p.affine(c)
    grad = X.chart_gradient(c, u)
    mags = np.abs(grad)
    if mags.max() < FRAME_PARTIAL_FLOOR:
        raise SingularPointError("all chart partials vanish at this point")
    piv = int(np.argmax(mags))
    q, r = [k for k in range(3) if k != piv]
    a = grad[q] / grad[piv]
    b = grad[r] / grad[piv]
    V1 = np.zeros(3, dtype=np.complex128)
    V2 = np.zeros(3, dtype=np.complex128)
    V1[piv], V1[q] = -a, 1
    V2[piv], V2[r] = -b, 1
    alpha = 1.0 / (1.0 + abs(a) ** 2 + abs(b) ** 2)
    phi1 = np.zeros(3, dtype=np.complex128)
    phi2 = np.zeros(3, dtype=np.complex128)
    phi1[piv] = -np.conj(a) * alpha
    phi1[q] = 1 - abs(a) ** 2 * alpha
    phi1[r] = -np.conj(a) * b * alpha
    phi2[piv] = -np.conj(b) * alpha
    phi2[q] = -a * np.conj(b) * alpha
    phi2[r] = 1 - abs(b) ** 2 * alpha
    frame = TangentFrame(
        base=p,
        chart=c,
        pivot=piv,
        partials=grad,
        V1=V1,
        V2=V2,
        phi1=phi1,
        phi2=phi2,
        alpha=alpha,
        theta1=float(np.angle(grad[piv])),
    )
    scale = mags.max()
    for V in (V1, V2):
        if abs(grad @ V) > FRAME_TOL * scale * np.abs(V).max():
            raise ArithmeticError("tangent frame failed the tangency check")
    dual = np.array([[phi1 @ V1, phi1 @ V2], [phi2 @ V1, phi2 @ V2]])
    if np.abs(dual - np.eye(2)).max() > FRAME_TOL:
        raise ArithmeticError("coframe failed the duality check")
    return frame
