"""Hyperkahler data on a quartic surface and the Kahler-angle argument.

Tangent vectors of X are written as ``X = xi1*V1 + xi2*V2 + conj`` with
``xi = (phi1(X), phi2(X))``. Real 4x4 matrices act on the real coordinates
``(Re xi1, Im xi1, Re xi2, Im xi2)``, i.e. on the basis
``(V1, iV1, V2, iV2)``.

In these coordinates J1 is multiplication by i and J2 is the anti-linear map
``xi -> conj(M xi)`` with

    M = [[tau, -mu e^{-i theta}], [lam e^{-i theta}, -conj(tau) e^{-2i theta}]]

so that conj(M) M = (|tau|^2 - lam*mu) I = -I exactly when lam*mu = |tau|^2 + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exactpoly import GaussRat, MultiPoly, divide_exact, parse_poly
from .quartic_surface import QuarticSurface, SurfacePointNum, TangentFrame, tangent_frame

__all__ = [
    "HKParams",
    "MetricAtPoint",
    "JTriple",
    "KahlerAngles",
    "RotationMatrix",
    "S2Point",
    "Eq4Data",
    "build_metric",
    "metric_from_data",
    "build_Jtriple",
    "check_quaternion",
    "angle_matrices",
    "angle_pairings",
    "angle_identity_residual",
    "triholo_residual",
    "solve_eq4",
    "volume_density",
    "angles_from_pullback",
    "angles_from_forms",
    "s_constancy_witness",
    "verify_map_h",
    "random_params",
    "random_so3",
    "random_s2",
    "realify_linear",
    "realify_antilinear",
]

CONSTRAINT_TOL = 1e-12
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class HKParams:
    rho: float
    lam: float
    mu: float
    tau: complex
    theta1: float = 0.0

    def __post_init__(self):
        for name in ("rho", "lam", "mu"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive real, got {v}")
        if not -math.pi < self.theta1 <= math.pi:
            raise ValueError("theta1 must lie in (-pi, pi]")

    @classmethod
    def from_tau(cls, rho: float, lam: float, tau: complex, theta1: float = 0.0) -> "HKParams":
        """Parameters with mu fixed by lam * mu = |tau|^2 + 1."""
        return cls(rho, lam, (abs(tau) ** 2 + 1) / lam, complex(tau), theta1)

    @property
    def constraint_residual(self) -> float:
        """Relative defect of lam * mu = |tau|^2 + 1."""
        return abs(self.lam * self.mu - abs(self.tau) ** 2 - 1) / (abs(self.tau) ** 2 + 1)

    def require_valid(self):
        if self.constraint_residual > CONSTRAINT_TOL:
            raise ValueError(f"lam*mu != |tau|^2 + 1 (relative defect {self.constraint_residual:.3g})")

    def with_theta(self, theta1: float) -> "HKParams":
        return HKParams(self.rho, self.lam, self.mu, self.tau, float(theta1))


@dataclass(frozen=True)
class MetricAtPoint:
    h: np.ndarray  # h[i, j] = h_{i jbar}
    S: float
    f1abs: float

    def real_metric(self) -> np.ndarray:
        """g(X, Y) = 2 Re(xi(X)^T h conj(xi(Y))) on the real basis."""
        basis = _complex_basis()
        return np.array([[2 * (a @ self.h @ np.conj(b)).real for b in basis] for a in basis])

    @property
    def is_hermitian(self) -> bool:
        return bool(np.allclose(self.h, self.h.conj().T, rtol=0, atol=1e-14 * np.abs(self.h).max()))


def _complex_basis() -> list[np.ndarray]:
    return [np.array(v, dtype=np.complex128) for v in ((1, 0), (1j, 0), (0, 1), (0, 1j))]


def _to_real(xi: np.ndarray) -> np.ndarray:
    return np.array([xi[0].real, xi[0].imag, xi[1].real, xi[1].imag])


def realify_linear(L: np.ndarray) -> np.ndarray:
    """4x4 real matrix of xi -> L xi."""
    return np.column_stack([_to_real(L @ e) for e in _complex_basis()])


def realify_antilinear(M: np.ndarray) -> np.ndarray:
    """4x4 real matrix of xi -> conj(M xi)."""
    return np.column_stack([_to_real(np.conj(M @ e)) for e in _complex_basis()])


def metric_from_data(params: HKParams, S: float, f1abs: float) -> MetricAtPoint:
    params.require_valid()
    if S < 1 - 1e-12 or f1abs <= 0:
        raise ValueError("need S >= 1 and |f_pivot| > 0")
    c = params.rho * S / (2 * f1abs)
    e = np.exp(1j * params.theta1)
    h12 = -c * params.tau * e
    h = np.array([[c * params.lam, h12], [np.conj(h12), c * params.mu]], dtype=np.complex128)
    return MetricAtPoint(h, float(S), float(f1abs))


def build_metric(params: HKParams, frame: TangentFrame) -> MetricAtPoint:
    """Metric coefficients at the frame's base point (pivot-relative S and |f_pivot|)."""
    return metric_from_data(params, frame.S, frame.f1abs)


@dataclass(frozen=True)
class JTriple:
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray

    def __iter__(self):
        return iter((self.J1, self.J2, self.J3))


def _m_matrix(params: HKParams) -> np.ndarray:
    e = np.exp(-1j * params.theta1)
    t = params.tau
    return np.array([[t, -params.mu * e], [params.lam * e, -np.conj(t) * e * e]], dtype=np.complex128)


def build_Jtriple(params: HKParams) -> JTriple:
    params.require_valid()
    J1 = realify_linear(1j * np.eye(2))
    J2 = realify_antilinear(_m_matrix(params))
    return JTriple(J1, J2, J1 @ J2)


def check_quaternion(t: JTriple, m: MetricAtPoint | np.ndarray | None = None) -> float:
    """Largest deviation among (J^p)^2 = -id, J1 J2 J3 = -id and metric compatibility.

    Matrix deviations use the max-abs entry. ``m`` may be a MetricAtPoint, a
    4x4 Gram matrix, or None for the identity (orthonormal frame); the
    compatibility defect is relative to the largest Gram entry.
    """
    I = np.eye(4)
    devs = [np.abs(J @ J + I).max() for J in t]
    devs.append(np.abs(t.J1 @ t.J2 @ t.J3 + I).max())
    if m is None:
        G = I
    elif isinstance(m, MetricAtPoint):
        G = m.real_metric()
    else:
        G = np.asarray(m, dtype=float)
    scale = np.abs(G).max()
    for J in t:
        devs.append(np.abs(J.T @ G @ J - G).max() / scale)
    return float(max(devs))


# -- Kahler angles -------------------------------------------------------------


@dataclass(frozen=True)
class KahlerAngles:
    """Stored as cosines; angles are available when the cosines lie in [-1, 1]."""

    cos1: float
    cos2: float
    cos3: float

    @classmethod
    def from_angles(cls, a1: float, a2: float, a3: float) -> "KahlerAngles":
        for a in (a1, a2, a3):
            if not 0 <= a <= math.pi:
                raise ValueError("Kahler angles lie in [0, pi]")
        return cls(math.cos(a1), math.cos(a2), math.cos(a3))

    @property
    def cosines(self) -> tuple[float, float, float]:
        return (self.cos1, self.cos2, self.cos3)

    @property
    def angles(self) -> tuple[float, float, float]:
        if any(abs(c) > 1 for c in self.cosines):
            raise ValueError("cosines outside [-1, 1] do not define angles")
        return tuple(math.acos(c) for c in self.cosines)

    @property
    def a1(self) -> float:
        return self.angles[0]

    @property
    def a2(self) -> float:
        return self.angles[1]

    @property
    def a3(self) -> float:
        return self.angles[2]


def angle_identity_residual(angles: KahlerAngles) -> float:
    """|cos^2 a1 + cos^2 a2 + cos^2 a3 - 1|."""
    return abs(sum(c * c for c in angles.cosines) - 1)


def angle_matrices(angles: KahlerAngles) -> JTriple:
    """The three complex structures in the frame adapted to a surface with these angles.

    The classical arrays list <J e_i, e_j> in row i, column j; the operator
    matrices returned here are their transposes, which is the reading under
    which J3 = J1 J2 holds.
    """
    P1, P2, P3 = angle_pairings(angles)
    return JTriple(P1.T.copy(), P2.T.copy(), P3.T.copy())


def angle_pairings(angles: KahlerAngles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The arrays of pairings <J^p e_i, e_j> in an adapted orthonormal frame."""
    c1, c2, c3 = angles.cosines
    s1sq = 1 - c1 * c1
    if s1sq <= DEGENERATE_TOL**2:
        raise ValueError("sin a1 = 0: the adapted frame degenerates")
    s1 = math.sqrt(s1sq)
    A1 = np.array([[0, c1, s1, 0], [-c1, 0, 0, -s1], [-s1, 0, 0, c1], [0, s1, -c1, 0]])
    p, q = c2 * c1 / s1, c3 / s1
    A2 = np.array([[0, c2, -p, q], [-c2, 0, q, p], [p, -q, 0, c2], [-q, -p, -c2, 0]])
    r, u = c3 * c1 / s1, c2 / s1
    A3 = np.array([[0, c3, -r, -u], [-c3, 0, -u, r], [r, u, 0, c3], [u, -r, -c3, 0]])
    return A1, A2, A3


# -- rotations and the sphere --------------------------------------------------


@dataclass(frozen=True)
class RotationMatrix:
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.shape != (3, 3):
            raise ValueError("rotation matrices are 3x3")
        if np.abs(A.T @ A - np.eye(3)).max() > 1e-12 or abs(np.linalg.det(A) - 1) > 1e-12:
            raise ValueError("matrix is not in SO(3)")
        object.__setattr__(self, "A", A)

    def row_dots(self, x: "S2Point") -> np.ndarray:
        """(a_1j x^j, a_2j x^j, a_3j x^j)."""
        return self.A @ x.x


@dataclass(frozen=True)
class S2Point:
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (3,) or abs(np.linalg.norm(x) - 1) > 1e-12:
            raise ValueError("not a unit vector in R^3")
        object.__setattr__(self, "x", x)


def random_so3(rng: np.random.Generator) -> RotationMatrix:
    """Haar-random rotation from a normalised Gaussian quaternion."""
    w, x, y, z = (q := rng.normal(size=4)) / np.linalg.norm(q)
    A = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )
    return RotationMatrix(A)


def random_s2(rng: np.random.Generator) -> S2Point:
    v = rng.normal(size=3)
    return S2Point(v / np.linalg.norm(v))


def random_params(rng: np.random.Generator, theta1: float | None = None) -> HKParams:
    """rho, lam log-uniform-ish positive, tau complex Gaussian, mu from the constraint."""
    rho = float(rng.uniform(0.2, 5.0))
    lam = float(rng.uniform(0.2, 5.0))
    tau = complex(*rng.normal(size=2))
    th = float(rng.uniform(-math.pi, math.pi)) if theta1 is None else theta1
    if th == -math.pi:
        th = math.pi
    return HKParams.from_tau(rho, lam, tau, th)


# -- the triholomorphic system on a chart ---------------------------------------


@dataclass(frozen=True)
class Eq4Data:
    """Chart derivatives of phi along z: d phi^2, d phi^3 and the conjugate slots
    d conj(phi^2), d conj(phi^3)."""

    dphi2: complex
    dphi3: complex
    dphi2bar: complex
    dphi3bar: complex


def _factors(A: RotationMatrix, x: S2Point) -> tuple[float, complex]:
    d = A.row_dots(x)
    one_plus = 1 + d[0]
    if abs(one_plus) <= DEGENERATE_TOL:
        raise ValueError("degenerate factor 1 + a_1j x^j = 0")
    return float(one_plus), complex(d[1], d[2])


def _rhs(params: HKParams, p: complex, q: complex) -> tuple[complex, complex]:
    e = np.exp(1j * params.theta1)
    t = params.tau
    return (np.conj(t) * p - params.mu * e * q, params.lam * e * p - t * e * e * q)


def triholo_residual(
    A: RotationMatrix,
    x: S2Point,
    params: HKParams,
    dphi2: complex,
    dphi3: complex,
    dphi2bar: complex,
    dphi3bar: complex,
) -> float:
    """Max modulus of the two chart equations

    i (1 + a1.x) d phi^2 + (a2.x + i a3.x)(conj(tau) d phibar^2 - mu e^{i theta} d phibar^3)
    i (1 + a1.x) d phi^3 + (a2.x + i a3.x)(lam e^{i theta} d phibar^2 - tau e^{2i theta} d phibar^3)
    """
    one_plus, b = _factors(A, x)
    r2, r3 = _rhs(params, dphi2bar, dphi3bar)
    e1 = 1j * one_plus * dphi2 + b * r2
    e2 = 1j * one_plus * dphi3 + b * r3
    return float(max(abs(e1), abs(e2)))


def solve_eq4(A: RotationMatrix, x: S2Point, params: HKParams, dphi2bar: complex, dphi3bar: complex) -> Eq4Data:
    """(d phi^2, d phi^3) solving the chart equations for given conjugate slots."""
    one_plus, b = _factors(A, x)
    r2, r3 = _rhs(params, dphi2bar, dphi3bar)
    return Eq4Data(complex(1j * b * r2 / one_plus), complex(1j * b * r3 / one_plus), complex(dphi2bar), complex(dphi3bar))


def _quad(params: HKParams, data: Eq4Data) -> float:
    """lam|p|^2 + mu|q|^2 - tau e^{i theta} conj(p) q - conj(tau) e^{-i theta} conj(q) p
    with p, q the conjugate slots; positive unless p = q = 0."""
    p, q = data.dphi2bar, data.dphi3bar
    e = np.exp(1j * params.theta1)
    val = (
        params.lam * abs(p) ** 2
        + params.mu * abs(q) ** 2
        - params.tau * e * np.conj(p) * q
        - np.conj(params.tau) * np.conj(e) * np.conj(q) * p
    )
    return float(val.real)


def volume_density(A: RotationMatrix, x: S2Point, params: HKParams, S: float, f1abs: float, data: Eq4Data) -> float:
    """D with dV = (i/2) D dz ^ dzbar for the pulled-back metric."""
    one_plus, _ = _factors(A, x)
    return params.rho * S / (f1abs * one_plus) * _quad(params, data)


def angles_from_pullback(
    A: RotationMatrix, x: S2Point, params: HKParams, S: float, data: Eq4Data, f1abs: float = 1.0
) -> KahlerAngles:
    """Closed-form Kahler angles: cos a1 = -a1.x, cos a{2,3} = -2 a{2,3}.x / (rho S)."""
    if triholo_residual(A, x, params, data.dphi2, data.dphi3, data.dphi2bar, data.dphi3bar) > 1e-10 * max(
        1.0, abs(data.dphi2bar), abs(data.dphi3bar)
    ):
        raise ValueError("data does not solve the triholomorphic chart equations")
    if volume_density(A, x, params, S, f1abs, data) <= 1e-300:
        raise ValueError("pulled-back volume density vanishes (branch point)")
    d = A.row_dots(x)
    k = 2.0 / (params.rho * S)
    return KahlerAngles(float(-d[0]), float(-k * d[1]), float(-k * d[2]))


def angles_from_forms(
    A: RotationMatrix, x: S2Point, params: HKParams, S: float, f1abs: float, data: Eq4Data
) -> KahlerAngles:
    """Kahler angles straight from their definition, as ratios of pulled-back forms to dV.

    Uses the pulled-back first Kahler form and phi^*Omega = dphi^2 ^ dphi^3 / f_1
    with f_1 = |f_1| e^{i theta}; dbar phi^k is conj(d phibar^k).
    """
    a, b = data.dphi2, data.dphi3
    p, q = data.dphi2bar, data.dphi3bar
    abar, bbar = np.conj(p), np.conj(q)  # dbar phi^2, dbar phi^3
    e = np.exp(1j * params.theta1)
    t = params.tau
    # dphi^j ^ dphibar^k = (d phi^j dbar phibar^k - dbar phi^j d phibar^k) dz ^ dzbar
    def wedge(dj, dbj, dk_bar, dbk_bar):
        return dj * dbk_bar - dbj * dk_bar

    w22 = wedge(a, abar, p, np.conj(a))
    w33 = wedge(b, bbar, q, np.conj(b))
    w23 = wedge(a, abar, q, np.conj(b))
    w32 = wedge(b, bbar, p, np.conj(a))
    c = params.rho * S / (2 * f1abs)
    omega1 = 0.5j * c * (params.lam * w22 + params.mu * w33 - t * e * w23 - np.conj(t) * np.conj(e) * w32)
    pull_omega = (a * bbar - b * abar) / (f1abs * e)
    dv = 0.5j * volume_density(A, x, params, S, f1abs, data)
    ratio = pull_omega / dv
    return KahlerAngles(float((omega1 / dv).real), float(ratio.real), float(ratio.imag))


# -- S-constancy on a surface ---------------------------------------------------


def s_constancy_witness(
    X: QuarticSurface,
    params: HKParams,
    A: RotationMatrix,
    samples: Sequence[SurfacePointNum],
    seed: int = 0,
    tol: float = 1e-10,
) -> dict:
    """Where on the samples can the closed-form angles satisfy the angle identity?

    At each point S is computed pivot-relatively; the identity holds iff
    rho * S = 2 (for generic x), and with rho = 2 that is S = 1, i.e. both
    non-pivot partials vanish.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for pt in samples:
        fr = tangent_frame(X, pt)
        S = fr.S
        x = random_s2(rng)
        d = A.row_dots(x)
        k = 2.0 / (params.rho * S)
        resid = angle_identity_residual(KahlerAngles(-d[0], -k * d[1], -k * d[2]))
        q, r = fr.others
        rows.append(
            {
                "S": S,
                "rho_S_is_2": abs(params.rho * S - 2) <= tol,
                "identity_residual": resid,
                "nonpivot_partials_vanish": abs(fr.partials[q]) + abs(fr.partials[r]) <= tol * fr.f1abs,
            }
        )
    s_vals = [row["S"] for row in rows]
    return {
        "samples": len(rows),
        "S_min": min(s_vals),
        "S_at_least_one": all(s >= 1 - 1e-12 for s in s_vals),
        "holds_count": sum(row["rho_S_is_2"] for row in rows),
        "S_equals_one_count": sum(abs(s - 1) <= tol for s in s_vals),
        "consistent": all((abs(row["S"] - 1) <= tol) == row["nonpivot_partials_vanish"] for row in rows),
        "rows": rows,
    }


# -- the example map h ------------------------------------------------------------

_H_VARS = ("z1", "z2", "z1bar", "z2bar", "w")
_W = 4  # index of the formal symbol w = e^{i pi / 4}


def _reduce_w(p: MultiPoly) -> MultiPoly:
    """Rewrite w^k with w^4 = -1 so every w-exponent is below 4."""
    terms: dict = {}
    for e, c in p.terms.items():
        k = e[_W]
        sign = -1 if (k // 4) % 2 else 1
        ne = e[:_W] + (k % 4,) + e[_W + 1 :]
        terms[ne] = terms.get(ne, GaussRat(0)) + (c if sign > 0 else -c)
    return MultiPoly(p.nvars, terms)


def verify_map_h() -> dict:
    """Exact checks on (z1, z2) -> [z1 : w z1 : z2 : w z2] into the Fermat quartic."""
    f = parse_poly("x0^4+x1^4+x2^4+x3^4", ("x0", "x1", "x2", "x3"))
    comps = [parse_poly(s, _H_VARS) for s in ("z1", "w*z1", "z2", "w*z2")]
    composed = _reduce_w(f.compose(comps))
    identity = composed.is_zero()
    holomorphic = all(c.degree_in(2) <= 0 and c.degree_in(3) <= 0 for c in comps)
    # components 0 and 2 are z1 and z2, so the only common zero is the origin
    z1, z2 = MultiPoly.var(5, 0), MultiPoly.var(5, 1)
    origin_only = comps[0] == z1 and comps[2] == z2
    vanish_at_origin = all(c.substitute({0: 0, 1: 0}).is_zero() for c in comps)
    ratio = divide_exact(comps[1], comps[0])
    z1_constant = ratio == MultiPoly.var(5, _W)
    w = np.exp(1j * np.pi / 4)
    image = np.array([1, w, 1, w])
    numeric_residual = float(abs(f.to_numeric()(image)))
    return {
        "symbolic_identity": identity,
        "composition": str(composed) if not identity else "0",
        "holomorphic": holomorphic,
        "origin_singular": bool(origin_only and vanish_at_origin),
        "z1_constant": "omega" if z1_constant else str(ratio),
        "image_at_(1,1)_residual": numeric_residual,
        "pass": bool(identity and holomorphic and origin_only and vanish_at_origin and z1_constant),
    }
