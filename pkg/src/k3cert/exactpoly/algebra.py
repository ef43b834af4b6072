"""Exact division, GCD and resultants for MultiPoly.

Polynomials are viewed as univariate in a chosen main variable with coefficients
in Q(i)[other variables]. Both the resultant and the GCD run subresultant
remainder sequences, so every intermediate division is exact and no fractions
in the other variables ever appear.
"""

from __future__ import annotations

from typing import Sequence

from .gaussrat import ZERO
from .multipoly import MultiPoly, partial_derivative

__all__ = [
    "ExactDivisionError",
    "divide_exact",
    "divides",
    "prem",
    "resultant",
    "sylvester_matrix",
    "gcd_poly",
    "gcd_many",
    "content_in",
    "squarefree_part",
]


class ExactDivisionError(ArithmeticError):
    pass


def _divmod_lead(p: MultiPoly, q: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Multivariate division by lex leading terms; stops at the first leading
    term of the remainder that the divisor's leading term does not divide."""
    if q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    n = p.nvars
    lq_exp, lq_c = q.leading_term()
    inv = lq_c.inverse()
    rest = [(e, c) for e, c in q.terms.items() if e != lq_exp]
    r = dict(p.terms)
    quot: dict = {}
    while r:
        le = max(r)
        diff = tuple(a - b for a, b in zip(le, lq_exp))
        if any(d < 0 for d in diff):
            break
        t = r.pop(le) * inv
        quot[diff] = t
        for e, c in rest:
            ne = tuple(a + b for a, b in zip(e, diff))
            v = r.get(ne, ZERO) - c * t
            if v:
                r[ne] = v
            else:
                r.pop(ne, None)
    return MultiPoly._raw(n, quot), MultiPoly._raw(n, r)


def divide_exact(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """``p / q`` when ``q`` divides ``p``; raises ExactDivisionError otherwise."""
    if q.is_constant():
        if q.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return p.scale(q.constant_term().inverse())
    quot, rem = _divmod_lead(p, q)
    if not rem.is_zero():
        raise ExactDivisionError("division is not exact")
    return quot


def divides(q: MultiPoly, p: MultiPoly) -> bool:
    try:
        divide_exact(p, q)
    except ExactDivisionError:
        return False
    return True


# -- univariate-in-main-variable views ----------------------------------------


def _deg(c: Sequence[MultiPoly]) -> int:
    return len(c) - 1


def _trim(c: list[MultiPoly]) -> list[MultiPoly]:
    while c and c[-1].is_zero():
        c.pop()
    return c


def _prem_coeffs(a: list[MultiPoly], b: list[MultiPoly]) -> list[MultiPoly]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b on coefficient lists."""
    da, db = _deg(a), _deg(b)
    lb = b[-1]
    r = list(a)
    e = da - db + 1
    while r and _deg(r) >= db:
        lr = r[-1]
        shift = _deg(r) - db
        new = [x * lb for x in r]
        for k in range(db + 1):
            new[k + shift] = new[k + shift] - lr * b[k]
        new.pop()
        r = _trim(new)
        e -= 1
    if e > 0 and r:
        f = lb**e
        r = [x * f for x in r]
    return r


def prem(p: MultiPoly, q: MultiPoly, var: int) -> MultiPoly:
    a = p.coeffs_in(var)
    b = q.coeffs_in(var)
    if not b:
        raise ZeroDivisionError("pseudo-remainder by zero")
    if _deg(a) < _deg(b):
        return p
    return MultiPoly.from_coeffs(p.nvars, var, _prem_coeffs(a, b))


def _div_list(c: list[MultiPoly], d: MultiPoly) -> list[MultiPoly]:
    return [divide_exact(x, d) for x in c]


def resultant(p: MultiPoly, q: MultiPoly, var: int) -> MultiPoly:
    """Resultant of ``p`` and ``q`` with respect to variable ``var``.

    Sign convention: the determinant of the Sylvester matrix whose top
    ``deg q`` rows carry the coefficients of ``p`` (highest power first).
    A polynomial constant in ``var`` is treated as having degree 0, so
    ``Res(c, q) = c**deg(q)``. The result keeps ``p.nvars`` variables with
    zero exponent in ``var``.
    """
    if p.nvars != q.nvars:
        raise ValueError("variable count mismatch")
    n = p.nvars
    if p.is_zero() and q.is_zero():
        raise ValueError("resultant of two zero polynomials")
    if p.is_zero() or q.is_zero():
        return MultiPoly.zero(n)
    a = p.coeffs_in(var)
    b = q.coeffs_in(var)
    sign = 1
    if _deg(a) < _deg(b):
        if _deg(a) % 2 == 1 and _deg(b) % 2 == 1:
            sign = -1
        a, b = b, a
    if _deg(b) == 0:
        out = b[0] ** _deg(a)
        return -out if sign < 0 else out
    g = MultiPoly.one(n)
    h = MultiPoly.one(n)
    while True:
        delta = _deg(a) - _deg(b)
        if _deg(a) % 2 == 1 and _deg(b) % 2 == 1:
            sign = -sign
        r = _prem_coeffs(a, b)
        if not r:
            return MultiPoly.zero(n)
        a = b
        b = _div_list(r, g * h**delta)
        g = a[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = divide_exact(g**delta, h ** (delta - 1))
        if _deg(b) == 0:
            break
    da = _deg(a)
    if da == 1:
        out = b[0]
    else:
        out = divide_exact(b[0] ** da, h ** (da - 1))
    return -out if sign < 0 else out


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: int) -> list[list[MultiPoly]]:
    """Sylvester matrix with ``p``'s rows on top, highest powers first."""
    a = p.coeffs_in(var)[::-1]
    b = q.coeffs_in(var)[::-1]
    m, k = len(a) - 1, len(b) - 1
    size = m + k
    zero = MultiPoly.zero(p.nvars)
    rows = []
    for i in range(k):
        rows.append([zero] * i + a + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + b + [zero] * (size - k - 1 - i))
    return rows


# -- gcd ------------------------------------------------------------------------


def _normalize(p: MultiPoly) -> MultiPoly:
    return p.monic() if not p.is_zero() else p


def content_in(p: MultiPoly, var: int) -> MultiPoly:
    """GCD of the coefficients of ``p`` viewed as a polynomial in ``var``."""
    return _content(p.coeffs_in(var), sorted(p.variables() - {var}))


def _content(coeffs: Sequence[MultiPoly], vars_: list[int]) -> MultiPoly:
    nz = [c for c in coeffs if not c.is_zero()]
    nz.sort(key=len)
    g = nz[0]
    for c in nz[1:]:
        if g.is_constant():
            break
        g = _gcd_rec(g, c, vars_)
    return _normalize(g)


def _gcd_rec(p: MultiPoly, q: MultiPoly, vars_: list[int]) -> MultiPoly:
    n = p.nvars
    if p.is_zero():
        return _normalize(q)
    if q.is_zero():
        return _normalize(p)
    if p.is_constant() or q.is_constant():
        return MultiPoly.one(n)
    used = sorted((p.variables() | q.variables()) & set(vars_)) if vars_ else []
    if not used:
        return MultiPoly.one(n)
    v = used[-1]
    rest = used[:-1]
    a = p.coeffs_in(v)
    b = q.coeffs_in(v)
    ca = _content(a, rest) if len(a) > 1 else _normalize(a[0])
    cb = _content(b, rest) if len(b) > 1 else _normalize(b[0])
    c = _gcd_rec(ca, cb, rest)
    if len(a) == 1 or len(b) == 1:
        return c
    a = _div_list(a, ca)
    b = _div_list(b, cb)
    if _deg(a) < _deg(b):
        a, b = b, a
    g = MultiPoly.one(n)
    h = MultiPoly.one(n)
    while True:
        delta = _deg(a) - _deg(b)
        r = _prem_coeffs(a, b)
        if not r:
            last = b
            break
        if _deg(r) == 0:
            return c
        a = b
        b = _div_list(r, g * h**delta)
        g = a[-1]
        if delta == 1:
            h = g
        elif delta > 1:
            h = divide_exact(g**delta, h ** (delta - 1))
    prim = _div_list(last, _content(last, rest))
    return _normalize(c * MultiPoly.from_coeffs(n, v, prim))


def gcd_poly(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor, monic in its lexicographically leading term.

    The result is constant (exactly 1) iff ``p`` and ``q`` share no factor of
    positive degree.
    """
    if p.nvars != q.nvars:
        raise ValueError("variable count mismatch")
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    return _gcd_rec(p, q, list(range(p.nvars)))


def gcd_many(polys: Sequence[MultiPoly]) -> MultiPoly:
    nz = [p for p in polys if not p.is_zero()]
    if not nz:
        raise ValueError("gcd of zero polynomials")
    nz.sort(key=lambda p: (p.total_degree(), len(p)))
    g = _normalize(nz[0])
    for p in nz[1:]:
        if g.is_constant():
            break
        g = gcd_poly(g, p)
    return g


def squarefree_part(p: MultiPoly) -> MultiPoly:
    """``p`` divided by ``gcd(p, dp/dx_0, ..., dp/dx_n)``: same zero set, no repeated factors."""
    if p.is_constant():
        return p
    g = p
    for v in sorted(p.variables()):
        if g.is_constant():
            break
        g = gcd_poly(g, partial_derivative(p, v))
    return divide_exact(p, g)
