"""Points of CP^2 / CP^3, the standard affine charts, and chart transitions.

Chart ``c`` is the open set ``x_c != 0`` with affine coordinates
``x_j / x_c`` for ``j != c`` in increasing ``j``: chart 0 carries
``(z1, z2, z3)``, chart 1 ``(y0, y2, y3)``, chart 2 ``(w0, w1, w3)`` and
chart 3 ``(v0, v1, v2)``.

Exact points hold GaussRat coordinates; numeric points hold Python complex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactpoly import (
    GaussRat,
    MultiPoly,
    ONE,
    as_gaussrat,
    check_homogeneous,
    dehomogenize,
    parse_gaussrat,
    partial_derivative,
)

__all__ = [
    "ChartError",
    "ProjPoint",
    "AffineCoords",
    "CHART_VARS",
    "chart_indices",
    "normalize",
    "to_chart",
    "from_chart",
    "transition",
    "transition_jacobian",
    "verify_transition_identity",
    "point_to_json",
    "point_from_json",
]

NUMERIC_REL_TOL = 1e-10

CHART_VARS = {
    0: ("z1", "z2", "z3"),
    1: ("y0", "y2", "y3"),
    2: ("w0", "w1", "w3"),
    3: ("v0", "v1", "v2"),
}


class ChartError(ValueError):
    """The point lies on the hyperplane removed by the requested chart."""


def chart_indices(chart: int, dim: int = 3) -> list[int]:
    """Homogeneous indices carried by a chart, in coordinate order."""
    if not 0 <= chart <= dim:
        raise ValueError(f"chart {chart} out of range for CP^{dim}")
    return [j for j in range(dim + 1) if j != chart]


def _is_exact(v) -> bool:
    return isinstance(v, GaussRat)


class ProjPoint:
    """A point of projective space; equality is proportionality."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence):
        if len(coords) not in (3, 4):
            raise ValueError("projective points live in CP^2 or CP^3")
        if all(_is_exact(c) or isinstance(c, int) or hasattr(c, "denominator") for c in coords):
            cs = tuple(as_gaussrat(c) for c in coords)
            if all(c.is_zero() for c in cs):
                raise ValueError("all homogeneous coordinates are zero")
        else:
            cs = tuple(complex(c) for c in coords)
            if not all(np.isfinite(c.real) and np.isfinite(c.imag) for c in cs):
                raise ValueError("non-finite coordinate")
            if max(abs(c) for c in cs) == 0:
                raise ValueError("all homogeneous coordinates are zero")
        self.coords = cs

    @property
    def exact(self) -> bool:
        return _is_exact(self.coords[0])

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def numeric(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coords], dtype=np.complex128)

    def normalize(self) -> "ProjPoint":
        return normalize(self)

    def max_chart(self) -> int:
        """Index of the max-modulus coordinate (the best-conditioned chart)."""
        return int(np.argmax(np.abs(self.numeric())))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint) or other.dim != self.dim:
            return NotImplemented
        if self.exact and other.exact:
            a, b = self.coords, other.coords
            n = len(a)
            return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(i + 1, n))
        return is_close(self, other)

    def __hash__(self):
        if not self.exact:
            raise TypeError("numeric projective points are not hashable")
        return hash(normalize(self).coords)

    def __repr__(self) -> str:
        if self.exact:
            body = ":".join(str(c) for c in self.coords)
        else:
            body = ":".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coords)
        return f"[{body}]"


def is_close(p: ProjPoint, q: ProjPoint, rel_tol: float = NUMERIC_REL_TOL) -> bool:
    """Scale-free numeric proportionality test via all 2x2 minors."""
    a = p.numeric()
    b = q.numeric()
    a = a / a[np.argmax(np.abs(a))]
    b = b / b[np.argmax(np.abs(b))]
    minors = np.abs(np.outer(a, b) - np.outer(b, a))
    return bool(minors.max() <= rel_tol)


def normalize(p: ProjPoint) -> ProjPoint:
    """Scale the first nonzero coordinate to 1.

    On numeric points "nonzero" means modulus above 1e-10 times the largest one.
    """
    if p.exact:
        k = next(j for j, c in enumerate(p.coords) if c)
        inv = p.coords[k].inverse()
        return ProjPoint([c * inv for c in p.coords])
    x = p.numeric()
    mags = np.abs(x)
    k = int(np.nonzero(mags > NUMERIC_REL_TOL * mags.max())[0][0])
    return ProjPoint(list(x / x[k]))


@dataclass(frozen=True)
class AffineCoords:
    chart: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def names(self) -> tuple[str, ...]:
        return CHART_VARS.get(self.chart, tuple(f"u{j}" for j in chart_indices(self.chart, len(self.values))))


def _nonzero(c) -> bool:
    return bool(c) if _is_exact(c) else abs(c) > 0


def to_chart(p: ProjPoint, chart: int) -> AffineCoords:
    c = p.coords[chart]
    if not _nonzero(c):
        raise ChartError(f"point {p!r} lies on x{chart} = 0")
    if p.exact:
        inv = c.inverse()
        vals = [p.coords[j] * inv for j in chart_indices(chart, p.dim)]
    else:
        vals = [p.coords[j] / c for j in chart_indices(chart, p.dim)]
    return AffineCoords(chart, vals)


def from_chart(a: AffineCoords) -> ProjPoint:
    vals = list(a.values)
    one = ONE if vals and _is_exact(vals[0]) else 1.0 + 0j
    vals.insert(a.chart, one)
    return ProjPoint(vals)


def transition(a: AffineCoords, target: int) -> AffineCoords:
    """Re-express chart coordinates in another chart (e.g. y0 = 1/z1, y2 = z2/z1)."""
    return to_chart(from_chart(a), target)


def transition_jacobian(a: AffineCoords, target: int) -> np.ndarray:
    """Derivative of the transition map at ``a`` as a 3x3 complex matrix.

    With ``s = u_target`` (the target coordinate in the source chart) the map
    is ``u'_j = u_j / s`` and ``du'_j = du_j / s - u_j ds / s^2``, where the
    source chart's own coordinate is the constant 1.
    """
    src = a.chart
    dim = len(a.values)
    src_idx = chart_indices(src, dim)
    tgt_idx = chart_indices(target, dim)
    full = np.ones(dim + 1, dtype=np.complex128)
    for j, v in zip(src_idx, a.values):
        full[j] = complex(v)
    s = full[target]
    if s == 0:
        raise ChartError(f"point not in chart {target}")
    pos = {j: k for k, j in enumerate(src_idx)}
    jac = np.zeros((dim, dim), dtype=np.complex128)
    for row, j in enumerate(tgt_idx):
        if j in pos:
            jac[row, pos[j]] += 1 / s
        jac[row, pos[target]] -= full[j] / s**2
    return jac


def verify_transition_identity(f: MultiPoly) -> bool:
    """Exact certificate of the chart 0 / chart 1 Euler-type identity.

    Checks, as an identity of polynomials in (z1, z2, z3), that

        -z1^3 * f_y0(1/z1, z2/z1, z3/z1) == z1 f_z1 + z2 f_z2 + z3 f_z3 - 4 f(1, z)

    so the two sides of ``-z1^3 f_y0 = sum z_i f_zi`` differ by a multiple of the
    chart-0 equation and agree on the surface. The left side is a polynomial
    once the z1-powers are cleared (f_y0 has degree at most 3).
    """
    if f.nvars != 4 or f.is_zero() or not check_homogeneous(f, 4):
        raise ValueError("verify_transition_identity needs a homogeneous quartic in 4 variables")
    f0 = dehomogenize(f, 0)  # variables z1, z2, z3
    f1 = dehomogenize(f, 1)  # variables y0, y2, y3
    fy0 = partial_derivative(f1, 0)
    # y0^a y2^b y3^c -> z1^(3-a-b-c) z2^b z3^c after multiplying by z1^3
    lhs_terms = {}
    for (a, b, c), coef in fy0.terms.items():
        k = 3 - a - b - c
        if k < 0:
            raise ValueError("unexpected degree in f_y0")
        lhs_terms[(k, b, c)] = -coef
    lhs = MultiPoly(3, lhs_terms)
    euler = MultiPoly.zero(3)
    for k in range(3):
        euler = euler + MultiPoly.var(3, k) * partial_derivative(f0, k)
    return (lhs - (euler - f0.scale(4))).is_zero()


def point_to_json(p: ProjPoint) -> dict:
    if p.exact:
        return {"coords": [str(c) for c in p.coords]}
    return {"coords": [[c.real, c.imag] for c in p.coords]}


def point_from_json(obj: dict) -> ProjPoint:
    coords = obj["coords"]
    if all(isinstance(c, str) for c in coords):
        return ProjPoint([parse_gaussrat(c) for c in coords])
    return ProjPoint([complex(c[0], c[1]) for c in coords])
