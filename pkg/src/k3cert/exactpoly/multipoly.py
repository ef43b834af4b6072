"""Sparse multivariate polynomials with Gaussian-rational coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gaussrat import ONE, ZERO, GaussRat, as_gaussrat

Exponent = tuple[int, ...]

__all__ = [
    "MultiPoly",
    "NumPoly",
    "HomogeneityCheck",
    "partial_derivative",
    "evaluate_exact",
    "evaluate_num",
    "check_homogeneous",
    "dehomogenize",
    "homogenize",
    "default_names",
]


def default_names(nvars: int) -> list[str]:
    return [f"x{k}" for k in range(nvars)]


def _add_exp(e1: Exponent, e2: Exponent) -> Exponent:
    return tuple([a + b for a, b in zip(e1, e2)])


class MultiPoly:
    """Polynomial in ``nvars`` variables as a map ``exponent tuple -> GaussRat``.

    Zero coefficients are never stored, so the zero polynomial is the empty map
    and equality of canonical forms is plain dict equality. Instances are treated
    as immutable; every operation returns a new polynomial.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, GaussRat] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for {nvars} variables")
            c = as_gaussrat(c)
            if c:
                clean[exp] = clean.get(exp, ZERO) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, GaussRat]) -> "MultiPoly":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        c = as_gaussrat(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls.constant(nvars, ONE)

    @classmethod
    def var(cls, nvars: int, index: int) -> "MultiPoly":
        exp = [0] * nvars
        exp[index] = 1
        return cls._raw(nvars, {tuple(exp): ONE})

    @classmethod
    def monomial(cls, nvars: int, exp: Sequence[int], c=ONE) -> "MultiPoly":
        return cls(nvars, {tuple(exp): c})

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and sum(next(iter(self.terms))) == 0)

    def constant_term(self) -> GaussRat:
        return self.terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        return max((e[var] for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(k for k, a in enumerate(e) if a)
        return used

    def leading_term(self) -> tuple[Exponent, GaussRat]:
        """Lexicographically largest term (x0 > x1 > ...)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms)
        return exp, self.terms[exp]

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "MultiPoly") -> None:
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._lift(other) - self

    def scale(self, c) -> "MultiPoly":
        c = as_gaussrat(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        if c.is_one():
            return self
        return MultiPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        if len(self.terms) > len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict[Exponent, GaussRat] = {}
        get = out.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = _add_exp(e1, e2)
                prev = get(e)
                out[e] = c1 * c2 if prev is None else prev + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == MultiPoly.constant(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- structure ---------------------------------------------------------
    def coeffs_in(self, var: int) -> list["MultiPoly"]:
        """Coefficients as a polynomial in ``var``: entry k multiplies var**k.

        Coefficients keep ``nvars`` variables with zero exponent in ``var``.
        """
        deg = self.degree_in(var)
        buckets: list[dict[Exponent, GaussRat]] = [{} for _ in range(deg + 1)]
        for e, c in self.terms.items():
            k = e[var]
            if k:
                e = e[:var] + (0,) + e[var + 1 :]
            buckets[k][e] = c
        return [MultiPoly._raw(self.nvars, b) for b in buckets]

    @classmethod
    def from_coeffs(cls, nvars: int, var: int, coeffs: Sequence["MultiPoly"]) -> "MultiPoly":
        out: dict[Exponent, GaussRat] = {}
        for k, cp in enumerate(coeffs):
            for e, c in cp.terms.items():
                if k:
                    e = e[:var] + (e[var] + k,) + e[var + 1 :]
                out[e] = out.get(e, ZERO) + c
        return MultiPoly._raw(nvars, {e: c for e, c in out.items() if c})

    def substitute(self, values: Mapping[int, object]) -> "MultiPoly":
        """Replace the given variables by constants, keeping ``nvars``."""
        vals = {k: as_gaussrat(v) for k, v in values.items()}
        powers: dict[tuple[int, int], GaussRat] = {}
        out: dict[Exponent, GaussRat] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for k, v in vals.items():
                a = e[k]
                if a:
                    key = (k, a)
                    p = powers.get(key)
                    if p is None:
                        p = powers[key] = v**a
                    c = c * p
                    ne[k] = 0
            if c:
                ne = tuple(ne)
                out[ne] = out.get(ne, ZERO) + c
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    def compose(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute polynomial ``images[k]`` for variable k."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        m = images[0].nvars
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(k: int, a: int) -> MultiPoly:
            key = (k, a)
            if key not in cache:
                cache[key] = images[k] if a == 1 else power(k, a - 1) * images[k]
            return cache[key]

        result = MultiPoly.zero(m)
        for e, c in self.terms.items():
            term = MultiPoly.constant(m, c)
            for k, a in enumerate(e):
                if a:
                    term = term * power(k, a)
            result = result + term
        return result

    def select_vars(self, keep: Sequence[int]) -> "MultiPoly":
        """Project onto the listed variables; all other exponents must be zero."""
        out = {}
        keep = list(keep)
        dropped = [k for k in range(self.nvars) if k not in keep]
        for e, c in self.terms.items():
            if any(e[k] for k in dropped):
                raise ValueError("polynomial involves a dropped variable")
            out[tuple(e[k] for k in keep)] = c
        return MultiPoly._raw(len(keep), out)

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Inverse of :meth:`select_vars`: variable k goes to ``positions[k]``."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for k, a in enumerate(e):
                ne[positions[k]] = a
            out[tuple(ne)] = c
        return MultiPoly._raw(nvars, out)

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def conjugate_coeffs(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: c.conjugate() for e, c in self.terms.items()})

    def monic(self) -> "MultiPoly":
        """Scale so the lexicographically leading coefficient is 1."""
        if not self.terms:
            return self
        return self.scale(self.leading_term()[1].inverse())

    # -- numerics ----------------------------------------------------------
    def to_numeric(self) -> "NumPoly":
        return NumPoly.from_poly(self)

    # -- text ----------------------------------------------------------------
    def render(self, names: Sequence[str] | None = None) -> str:
        from .parser import render_poly

        return render_poly(self, names)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.render()!r})"


@dataclass(frozen=True)
class NumPoly:
    """Floating-point evaluator for a MultiPoly (vectorised over points)."""

    exps: np.ndarray
    coeffs: np.ndarray
    nvars: int

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "NumPoly":
        if p.terms:
            exps = np.array(list(p.terms.keys()), dtype=np.int64)
            coeffs = np.array([complex(c) for c in p.terms.values()], dtype=np.complex128)
        else:
            exps = np.zeros((0, p.nvars), dtype=np.int64)
            coeffs = np.zeros(0, dtype=np.complex128)
        return cls(exps, coeffs, p.nvars)

    def __call__(self, x) -> complex | np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[-1] != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {x.shape[-1]}")
        if self.coeffs.size == 0:
            return np.zeros(x.shape[:-1], dtype=np.complex128)[()] if x.ndim > 1 else 0j
        mons = np.prod(x[..., None, :] ** self.exps, axis=-1)
        val = mons @ self.coeffs
        return complex(val) if x.ndim == 1 else val

    def abs_coeff_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())


def partial_derivative(p: MultiPoly, var: int) -> MultiPoly:
    if not 0 <= var < p.nvars:
        raise IndexError(f"variable index {var} out of range")
    out = {}
    for e, c in p.terms.items():
        a = e[var]
        if a:
            out[e[:var] + (a - 1,) + e[var + 1 :]] = c * a
    return MultiPoly._raw(p.nvars, out)


def _horner(p: MultiPoly, point: Sequence, zero, start: int):
    """Recursive Horner scheme on variable ``start``."""
    if start == p.nvars or p.is_zero():
        return p.constant_term() if isinstance(zero, GaussRat) else complex(p.constant_term())
    coeffs = p.coeffs_in(start)
    x = point[start]
    acc = zero
    for cp in reversed(coeffs):
        acc = acc * x + _horner(cp, point, zero, start + 1)
    return acc


def evaluate_exact(p: MultiPoly, point: Sequence) -> GaussRat:
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    pt = [as_gaussrat(v) for v in point]
    # power tables are cheaper than repeated Horner splitting for sparse input
    total = ZERO
    cache: dict[tuple[int, int], GaussRat] = {}
    for e, c in p.terms.items():
        t = c
        for k, a in enumerate(e):
            if a:
                key = (k, a)
                v = cache.get(key)
                if v is None:
                    v = cache[key] = pt[k] ** a
                t = t * v
        total = total + t
    return total


def evaluate_num(p: MultiPoly, point: Sequence) -> complex:
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    pt = [complex(v) for v in point]
    return complex(_horner(p, pt, 0j, 0))


@dataclass(frozen=True)
class HomogeneityCheck:
    ok: bool
    offending: Exponent | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_homogeneous(p: MultiPoly, d: int) -> HomogeneityCheck:
    """All terms of degree ``d`` and Euler's identity sum x_i dp/dx_i == d p exactly.

    The zero polynomial is homogeneous of every degree.
    """
    for e in p.terms:
        if sum(e) != d:
            return HomogeneityCheck(False, e, f"term of degree {sum(e)}")
    euler = MultiPoly.zero(p.nvars)
    for k in range(p.nvars):
        euler = euler + MultiPoly.var(p.nvars, k) * partial_derivative(p, k)
    if euler != p.scale(d):
        return HomogeneityCheck(False, None, "Euler identity fails")
    return HomogeneityCheck(True)


def dehomogenize(p: MultiPoly, i: int) -> MultiPoly:
    """Set x_i = 1 and drop that variable, keeping the others in order."""
    d = p.total_degree()
    if d >= 0 and not check_homogeneous(p, d):
        raise ValueError("dehomogenize needs a homogeneous polynomial")
    keep = [k for k in range(p.nvars) if k != i]
    return p.substitute({i: ONE}).select_vars(keep)


def homogenize(p: MultiPoly, i: int, d: int | None = None) -> MultiPoly:
    """Insert a new variable at position ``i`` raising every term to degree ``d``."""
    if d is None:
        d = max(p.total_degree(), 0)
    out = {}
    for e, c in p.terms.items():
        k = d - sum(e)
        if k < 0:
            raise ValueError(f"term degree {sum(e)} exceeds target degree {d}")
        out[e[:i] + (k,) + e[i:]] = c
    return MultiPoly._raw(p.nvars + 1, out)


def linear_form(coeffs: Iterable) -> MultiPoly:
    coeffs = [as_gaussrat(c) for c in coeffs]
    n = len(coeffs)
    return MultiPoly(n, {tuple(1 if j == k else 0 for j in range(n)): c for k, c in enumerate(coeffs)})
