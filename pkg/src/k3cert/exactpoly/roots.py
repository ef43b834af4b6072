"""Univariate polynomials over Q(i): Euclid, square-free decomposition, roots.

Root multiplicities come from Yun's square-free decomposition and are exact.
Only the root locations are floating point: companion-matrix eigenvalues of
each square-free factor, polished by Newton steps.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .gaussrat import ZERO, GaussRat
from .multipoly import MultiPoly

__all__ = [
    "as_univariate",
    "from_univariate",
    "ugcd",
    "udiv",
    "uderiv",
    "squarefree_decomposition",
    "numeric_coeffs",
    "polish_roots",
    "univariate_roots",
]

Coeffs = list[GaussRat]  # low -> high, no trailing zeros


def as_univariate(p: MultiPoly) -> tuple[Coeffs, int]:
    """Dense coefficient list of a polynomial in at most one variable."""
    used = p.variables()
    if len(used) > 1:
        raise ValueError(f"expected a univariate polynomial, found variables {sorted(used)}")
    var = used.pop() if used else 0
    if p.is_zero():
        return [], var
    out = [ZERO] * (p.degree_in(var) + 1)
    for e, c in p.terms.items():
        out[e[var]] = c
    return out, var


def from_univariate(c: Sequence[GaussRat], nvars: int, var: int) -> MultiPoly:
    terms = {}
    for k, v in enumerate(c):
        if v:
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = v
    return MultiPoly._raw(nvars, terms)


def _trim(c: Coeffs) -> Coeffs:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def _monic(c: Coeffs) -> Coeffs:
    if not c:
        return c
    inv = c[-1].inverse()
    return [x * inv for x in c]


def udivmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    r = _trim(a)
    db = len(b) - 1
    inv = b[-1].inverse()
    q = [ZERO] * max(len(r) - db, 0)
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        t = r[-1] * inv
        q[shift] = t
        for k in range(db + 1):
            r[k + shift] = r[k + shift] - t * b[k]
        r = _trim(r)
    return _trim(q), r


def udiv(a: Coeffs, b: Coeffs) -> Coeffs:
    q, r = udivmod(a, b)
    if r:
        raise ArithmeticError("univariate division is not exact")
    return q


def uderiv(a: Coeffs) -> Coeffs:
    return _trim([a[k] * k for k in range(1, len(a))])


def ugcd(a: Coeffs, b: Coeffs) -> Coeffs:
    """Monic gcd over the field Q(i); gcd(0, 0) is the empty list."""
    a, b = _trim(a), _trim(b)
    while b:
        _, r = udivmod(a, b)
        a, b = b, r
    return _monic(a)


def squarefree_decomposition(a: Coeffs) -> list[tuple[Coeffs, int]]:
    """Yun's algorithm: monic square-free, pairwise coprime g_k with a ~ prod g_k^k."""
    a = _monic(_trim(a))
    if len(a) <= 1:
        return []
    b = uderiv(a)
    c = ugcd(a, b)
    w = udiv(a, c)
    y = udiv(b, c)
    out = []
    k = 1
    while len(w) > 1:
        n = max(len(y), len(w))
        z = _trim([yy - ww for yy, ww in zip(_pad(y, n), _pad(uderiv(w), n))])
        g = ugcd(w, z)
        if len(g) > 1:
            out.append((g, k))
        w = udiv(w, g)
        y = udiv(z, g) if z else []
        k += 1
    return out


def _pad(c: Coeffs, n: int) -> Coeffs:
    return list(c) + [ZERO] * max(0, n - len(c))


def numeric_coeffs(c: Sequence[GaussRat]) -> np.ndarray:
    """Complex coefficients (low -> high) rescaled by a power of two to stay in range."""
    shift = max((x.log2_size() for x in c if x), default=0)
    return np.array([x.to_complex(shift) for x in c], dtype=np.complex128)


def polish_roots(coeffs: np.ndarray, roots: np.ndarray, steps: int = 4) -> np.ndarray:
    """Newton refinement on a polynomial given low -> high; keeps steps that help."""
    p = coeffs[::-1]
    dp = np.polyder(p)
    roots = np.array(roots, dtype=np.complex128)
    for _ in range(steps):
        val = np.polyval(p, roots)
        der = np.polyval(dp, roots)
        ok = der != 0
        step = np.zeros_like(roots)
        step[ok] = val[ok] / der[ok]
        cand = roots - step
        better = np.abs(np.polyval(p, cand)) <= np.abs(val)
        roots = np.where(better, cand, roots)
    return roots


def _numeric_roots(c: Coeffs) -> np.ndarray:
    nc = numeric_coeffs(c)
    if len(nc) <= 1:
        return np.zeros(0, dtype=np.complex128)
    roots = np.roots(nc[::-1])
    return polish_roots(nc, roots)


def univariate_roots(p: MultiPoly) -> list[tuple[complex, int]]:
    """Roots of a univariate polynomial with exact multiplicities.

    Multiplicities sum to the degree. Roots of different square-free factors are
    reported separately even when numerically close.
    """
    c, _ = as_univariate(p)
    if not c:
        raise ValueError("roots of the zero polynomial")
    out: list[tuple[complex, int]] = []
    for g, k in squarefree_decomposition(c):
        if len(g) == 2:
            # linear factor: exact root
            out.append((complex(-g[0] / g[1]), k))
            continue
        out.extend((complex(r), k) for r in _numeric_roots(g))
    out.sort(key=lambda rk: (round(rk[0].real, 12), round(rk[0].imag, 12), rk[1]))
    return out
